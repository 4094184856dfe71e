//! Lowest curl and grad-div eigenvalues on the unit ball, with multiplicities.

use ballspec::modes::indices_below;
use ballspec::{alpha, rho, Family};

fn main() -> ballspec::Result<()> {
    println!("zeros of psi_n (curl) and psi_n' (grad-div)");
    println!("{:>3} {:>3} {:>14} {:>14}", "n", "m", "rho", "alpha");
    for n in 0..4 {
        for m in 1..4 {
            println!(
                "{n:>3} {m:>3} {:>14.10} {:>14.10}",
                rho(n, m)?,
                alpha(n, m)?
            );
        }
    }

    let radius = 1.0;
    let below = indices_below(&[Family::CurlPlus, Family::GradDiv], 7.0, radius)?;
    println!("\n{} modes with wavenumber below 7:", below.len());
    let mut last = None;
    for (idx, w) in &below {
        let key = (idx.family, idx.n, idx.m);
        if last != Some(key) {
            let mult = below
                .iter()
                .filter(|(i, _)| (i.family, i.n, i.m) == key)
                .count();
            println!(
                "  {:<8} n={} m={} wavenumber {w:.6} x{mult}",
                idx.family.to_string(),
                idx.n,
                idx.m
            );
            last = Some(key);
        }
    }
    Ok(())
}
