//! Powers of rot and grad-div in coefficient space, scale norms and class diagnostics.

use ballspec::spectral::ClassC;
use ballspec::{
    apply_power, class_report, enumerate, scale_norm, solve_poly, Cutoff, Family, Operator,
    ScaleOrder, SpectralField,
};

fn main() -> ballspec::Result<()> {
    let radius = 1.0;
    let modes = enumerate(&Family::ALL, Cutoff::First(200), radius)?;
    let u = SpectralField::from_pairs(
        radius,
        modes.iter().map(|m| (m.index, m.wavenumber.powi(-3))),
    );

    for m in [-2, -1, 0, 1, 2] {
        println!("W^{m:<2} norm {:.6e}", scale_norm(&u, ScaleOrder::w(m)));
    }
    for k in [-2, 0, 2] {
        println!("A^{k:<2} norm {:.6e}", scale_norm(&u, ScaleOrder::a(k)?));
    }

    // {u,u}_m = {S^{2m}u, S^{2m}u}_{-m}
    let v = apply_power(&u, Operator::Curl, 4)?;
    println!(
        "norm symmetry m=2: {:.15e} vs {:.15e}",
        scale_norm(&u, ScaleOrder::w(2)),
        scale_norm(&v, ScaleOrder::w(-2))
    );

    let w = solve_poly(&u.curl_part(), Operator::Curl, 1)?;
    let back = apply_power(&w, Operator::Curl, 2)?;
    println!(
        "rot^2 w = u residual {:.1e}",
        back.sub(&u.curl_part())?.norm()
    );

    let rep = class_report(&u, ClassC { k: 1, m: 1 })?;
    println!(
        "C(2,1): A-norm {:.4e} tail {:.3}, W-norm {:.4e} tail {:.3}",
        rep.a_norm, rep.a_tail_ratio, rep.w_norm, rep.w_tail_ratio
    );
    println!("note: {}", rep.note);
    Ok(())
}
