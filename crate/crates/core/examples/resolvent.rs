//! The three model problems, including the Fredholm alternative at an eigenvalue.

use ballspec::solve::residual_check;
use ballspec::{
    resolvent_curl, rho, solve_problem1, solve_problem3, Error, ModeIndex, Problem, SpectralField,
};

fn main() -> ballspec::Result<()> {
    let radius = 1.0;
    let q: ModeIndex = "1,1,0,+".parse()?;
    let g: ModeIndex = "0,1,0,g".parse()?;

    let f = SpectralField::single(q, 1.0, radius);
    let r = solve_problem1(&f, 1.0, None)?;
    println!(
        "rot u + u = q: coefficient {:.15} (1/(1+rho11) = {:.15})",
        r.solution.get(&q),
        1.0 / (1.0 + rho(1, 1)?)
    );
    let chk = residual_check(&r.solution, &f, 1.0, Problem::One, 30, 1)?;
    println!(
        "  coefficient residual {:.1e}, finite-difference residual {:.1e}",
        chk.coef_residual, chk.fd_residual
    );

    let f3 = SpectralField::from_pairs(radius, [(q, 1.0), (g, 1.0)]);
    let r3 = solve_problem3(&f3, 1.0, None)?;
    println!("grad div u + rot u + u = q + g:");
    for (idx, c) in r3.solution.iter() {
        println!("  {idx}: {c:.15}");
    }

    // λ = ρ_{2,1}: the curl- modes of degree 2 resonate
    let lam = rho(2, 1)? / radius;
    let bad = SpectralField::from_pairs(radius, [(q, 1.0), ("2,1,-1,-".parse()?, 0.3)]);
    match resolvent_curl(&bad, lam, None) {
        Err(Error::NotSolvable(rep)) => println!(
            "at lambda = {lam:.6}: not solvable, violated {:?}",
            rep.violated_conditions
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
        ),
        other => println!("unexpected: {other:?}"),
    }
    let ok = resolvent_curl(&f, lam, None)?;
    println!(
        "orthogonal right side: solved, kernel {:?}",
        ok.kernel_basis
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
    );
    Ok(())
}
