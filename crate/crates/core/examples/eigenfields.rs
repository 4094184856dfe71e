//! Evaluates a few normalized eigenfields and checks rot u = λu by finite differences.

use ballspec::diffops;
use ballspec::{enumerate, Cutoff, Family, FieldEvaluator, SphericalPoint};

fn main() -> ballspec::Result<()> {
    let mut modes = enumerate(&[Family::CurlPlus], Cutoff::First(4), 1.0)?;
    modes.extend(enumerate(&[Family::CurlMinus], Cutoff::First(2), 1.0)?);
    modes.extend(enumerate(&[Family::GradDiv], Cutoff::First(4), 1.0)?);
    let p = SphericalPoint::new(0.6, 1.0, 0.4);
    let x = p.to_cartesian();
    for m in &modes {
        let u = m.eval(&p)?;
        print!(
            "{:<10} eigenvalue {:>9.5}  u = ({:+.6}, {:+.6}, {:+.6})",
            m.index.to_string(),
            m.eigenvalue,
            u.r,
            u.theta,
            u.phi
        );
        if m.index.is_curl() {
            let c = diffops::curl(m, x, 1e-3)?;
            let lu = m.eval_cartesian(x)?.map(|v| v * m.eigenvalue);
            let err = (0..3).map(|a| (c[a] - lu[a]).powi(2)).sum::<f64>().sqrt();
            println!("  |rot u - lu| = {err:.1e}");
        } else {
            let g = diffops::grad_div(m, x, 1e-3, 5e-3)?;
            let mu = m.eval_cartesian(x)?.map(|v| v * m.eigenvalue);
            let err = (0..3).map(|a| (g[a] - mu[a]).powi(2)).sum::<f64>().sqrt();
            println!("  |grad div v - mu v| = {err:.1e}");
        }
    }
    Ok(())
}
