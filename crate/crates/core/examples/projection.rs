//! Projects an analytic field onto the eigenbasis and reports the captured energy.

use ballspec::quad::default_quadrature;
use ballspec::{
    enumerate, inner_product, project, Cutoff, Family, FnField, SphVec, SphericalPoint,
};

fn main() -> ballspec::Result<()> {
    // a swirl about z plus a radial bump, tangent to the boundary
    let f = FnField(|p: &SphericalPoint| {
        let [x, y, z] = p.to_cartesian();
        let s = 1.0 - p.r * p.r;
        SphVec::from_cartesian([-y * s + x * s * z, x * s + y * s * z, s * z * z], p)
    });
    let radius = 1.0;
    for count in [10, 40, 120] {
        let modes = enumerate(&Family::ALL, Cutoff::First(count), radius)?;
        let q = default_quadrature(&modes, radius)?;
        let sf = project(&f, &modes, &q)?;
        let total = inner_product(&f, &f, &q)?;
        let (a, v) = (sf.graddiv_part().norm(), sf.curl_part().norm());
        println!(
            "{count:>4} modes: captured {:.6} of |f|^2 = {total:.6} (potential {:.4}, solenoidal {:.4})",
            sf.norm().powi(2) / total,
            a * a,
            v * v
        );
    }
    Ok(())
}
