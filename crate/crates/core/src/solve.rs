//! Resolvents of S and 𝒩_d with the Fredholm alternative, and the three model
//! problems
//!
//! ```text
//! 1:  rot u + λu = f
//! 2:  ∇div u + λu = f
//! 3:  ∇div u + rot u + λu = f
//! ```
//!
//! all solved mode by mode in coefficient space.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diffops;
use crate::error::{Error, Result};
use crate::geom::{FieldEvaluator, SphericalPoint};
use crate::modes::{indices_below, Family, ModeIndex};
use crate::quad::SpectralField;
use crate::spectral::{eigenvalue, Operator};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solution: SpectralField,
    pub resonant: bool,
    pub resonant_eigenvalue: Option<f64>,
    /// resonant modes on which f has a nonzero coefficient
    pub violated_conditions: Vec<ModeIndex>,
    /// the full resonant eigenspace; any combination may be added to the solution
    pub kernel_basis: Vec<ModeIndex>,
    /// ‖(L + λ)u − f‖ over the coefficients
    pub residual_norm: f64,
}

/// Default resonance band: 1e-9·|λ| + 1e-12.
pub fn default_eps(lambda: f64) -> f64 {
    1e-9 * lambda.abs() + 1e-12
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Problem {
    /// rot u + λu = f
    One,
    /// ∇div u + λu = f
    Two,
    /// ∇div u + rot u + λu = f
    Three,
}

impl Problem {
    pub fn from_id(id: u8) -> Option<Problem> {
        match id {
            1 => Some(Problem::One),
            2 => Some(Problem::Two),
            3 => Some(Problem::Three),
            _ => None,
        }
    }

    fn has_curl(self) -> bool {
        !matches!(self, Problem::Two)
    }

    fn has_graddiv(self) -> bool {
        !matches!(self, Problem::One)
    }
}

/// Diagonal entry of L + λ for one mode, where L is the problem's operator.
fn divisor(problem: Problem, idx: &ModeIndex, lambda: f64, radius: f64) -> f64 {
    let active = if idx.is_curl() {
        problem.has_curl()
    } else {
        problem.has_graddiv()
    };
    if active {
        lambda + eigenvalue(idx, radius)
    } else {
        lambda
    }
}

/// (L + λ)u in coefficient space.
pub fn apply_operator(u: &SpectralField, problem: Problem, lambda: f64) -> SpectralField {
    u.map(|idx, c| divisor(problem, idx, lambda, u.radius) * c)
}

/// All modes of `families` with |λ + eigenvalue| ≤ eps.
fn resonant_modes(
    families: &[Family],
    lambda: f64,
    eps: f64,
    radius: f64,
) -> Result<Vec<ModeIndex>> {
    let mut out = Vec::new();
    for &fam in families {
        // wavenumber at which λ + eigenvalue can vanish
        let target = match fam {
            Family::CurlPlus if lambda < 0.0 => -lambda,
            Family::CurlMinus if lambda > 0.0 => lambda,
            Family::GradDiv if lambda > 0.0 => lambda.sqrt(),
            _ => continue,
        };
        let reach = match fam {
            Family::GradDiv => (target * target + eps).sqrt(),
            _ => target + eps,
        };
        for (idx, _) in indices_below(&[fam], reach * (1.0 + 1e-12), radius)? {
            if (lambda + eigenvalue(&idx, radius)).abs() <= eps {
                out.push(idx);
            }
        }
    }
    out.sort();
    Ok(out)
}

fn check_support(f: &SpectralField, op: Operator) -> Result<()> {
    if let Some(idx) = f.coefficients.keys().find(|i| !op.acts_on(i)) {
        return Err(Error::WrongFamily {
            expected: match op {
                Operator::Curl => "curl",
                Operator::GradDiv => "graddiv",
            },
            got: *idx,
        });
    }
    Ok(())
}

/// Divides each coefficient by its divisor, taking the Fredholm branch on
/// resonant modes.
fn diagonal_solve(
    f: &SpectralField,
    problem: Problem,
    families: &[Family],
    lambda: f64,
    eps: f64,
) -> Result<SolveReport> {
    let kernel = resonant_modes(families, lambda, eps, f.radius)?;
    let kernel_set: BTreeSet<ModeIndex> = kernel.iter().copied().collect();
    let mut violated = Vec::new();
    let mut solution = SpectralField::new(f.radius);
    for (idx, &c) in f.iter() {
        if kernel_set.contains(idx) {
            if c.abs() > eps {
                violated.push(*idx);
            }
            solution.set(*idx, 0.0);
        } else {
            solution.set(*idx, c / divisor(problem, idx, lambda, f.radius));
        }
    }
    let resonant_eigenvalue = kernel.first().map(|i| eigenvalue(i, f.radius));
    let residual_norm = apply_operator(&solution, problem, lambda).sub(f)?.norm();
    let report = SolveReport {
        resonant: !kernel.is_empty(),
        resonant_eigenvalue,
        violated_conditions: violated,
        kernel_basis: kernel,
        residual_norm,
        solution,
    };
    if report.violated_conditions.is_empty() {
        Ok(report)
    } else {
        Err(Error::NotSolvable(Box::new(SolveReport {
            solution: SpectralField::new(f.radius),
            ..report
        })))
    }
}

fn eps_or_default(eps_spec: Option<f64>, lambda: f64) -> f64 {
    eps_spec.unwrap_or_else(|| default_eps(lambda))
}

/// (S + λI)⁻¹ f for f on the curl families.
pub fn resolvent_curl(
    f: &SpectralField,
    lambda: f64,
    eps_spec: Option<f64>,
) -> Result<SolveReport> {
    check_support(f, Operator::Curl)?;
    let eps = eps_or_default(eps_spec, lambda);
    diagonal_solve(
        f,
        Problem::One,
        &[Family::CurlPlus, Family::CurlMinus],
        lambda,
        eps,
    )
}

/// (𝒩_d + λI)⁻¹ f for f on the grad-div family.
pub fn resolvent_graddiv(
    f: &SpectralField,
    lambda: f64,
    eps_spec: Option<f64>,
) -> Result<SolveReport> {
    check_support(f, Operator::GradDiv)?;
    let eps = eps_or_default(eps_spec, lambda);
    diagonal_solve(f, Problem::Two, &[Family::GradDiv], lambda, eps)
}

fn solve_problem(
    f: &SpectralField,
    problem: Problem,
    lambda: f64,
    eps_spec: Option<f64>,
) -> Result<SolveReport> {
    if lambda == 0.0 {
        if !problem.has_graddiv() && !f.graddiv_part().is_empty() && f.graddiv_part().norm() > 0.0 {
            return Err(Error::ZeroLambdaWithPart("potential (grad-div)"));
        }
        if !problem.has_curl() && !f.curl_part().is_empty() && f.curl_part().norm() > 0.0 {
            return Err(Error::ZeroLambdaWithPart("solenoidal (curl)"));
        }
    }
    let eps = eps_or_default(eps_spec, lambda);
    let mut families = Vec::new();
    if problem.has_curl() {
        families.extend([Family::CurlPlus, Family::CurlMinus]);
    }
    if problem.has_graddiv() {
        families.push(Family::GradDiv);
    }
    diagonal_solve(f, problem, &families, lambda, eps)
}

/// rot u + λu = f: u_A = λ⁻¹ f_A, u_V = (S + λI)⁻¹ f_V.
pub fn solve_problem1(
    f: &SpectralField,
    lambda: f64,
    eps_spec: Option<f64>,
) -> Result<SolveReport> {
    solve_problem(f, Problem::One, lambda, eps_spec)
}

/// ∇div w + λw = f: w_A = (𝒩_d + λI)⁻¹ f_A, w_V = λ⁻¹ f_V.
pub fn solve_problem2(
    f: &SpectralField,
    lambda: f64,
    eps_spec: Option<f64>,
) -> Result<SolveReport> {
    solve_problem(f, Problem::Two, lambda, eps_spec)
}

/// ∇div u + rot u + λu = f: both resolvents.
pub fn solve_problem3(
    f: &SpectralField,
    lambda: f64,
    eps_spec: Option<f64>,
) -> Result<SolveReport> {
    solve_problem(f, Problem::Three, lambda, eps_spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualCheck {
    /// ‖(L + λ)u − f‖ in coefficients
    pub coef_residual: f64,
    /// RMS of the pointwise finite-difference residual over RMS of f
    pub fd_residual: f64,
}

/// Compares (L + λ)u with f exactly in coefficients and by finite
/// differences of the synthesized fields at `samples` random interior points.
pub fn residual_check(
    u: &SpectralField,
    f: &SpectralField,
    lambda: f64,
    problem: Problem,
    samples: usize,
    seed: u64,
) -> Result<ResidualCheck> {
    let coef_residual = apply_operator(u, problem, lambda).sub(f)?.norm();
    let radius = u.radius;
    let uf = u.evaluator()?;
    let ff = f.evaluator()?;
    let h = diffops::DEFAULT_STEP * radius;
    let h_outer = 5.0 * h;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut num = 0.0;
    let mut den = 0.0;
    for _ in 0..samples {
        let p = random_interior_point(&mut rng, 0.85 * radius);
        let x = p.to_cartesian();
        let mut lhs = uf.eval_cartesian(x)?.map(|c| lambda * c);
        if problem.has_curl() {
            let c = diffops::curl(&uf, x, h)?;
            for a in 0..3 {
                lhs[a] += c[a];
            }
        }
        if problem.has_graddiv() {
            let g = diffops::grad_div(&uf, x, h, h_outer)?;
            for a in 0..3 {
                lhs[a] += g[a];
            }
        }
        let rhs = ff.eval_cartesian(x)?;
        for a in 0..3 {
            num += (lhs[a] - rhs[a]).powi(2);
            den += rhs[a].powi(2);
        }
    }
    let fd_residual = if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    };
    Ok(ResidualCheck {
        coef_residual,
        fd_residual,
    })
}

/// Uniform in the ball of radius `r_max`.
pub fn random_interior_point<R: Rng>(rng: &mut R, r_max: f64) -> SphericalPoint {
    let r = r_max * rng.gen::<f64>().cbrt();
    let theta = (1.0 - 2.0 * rng.gen::<f64>()).acos();
    let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    SphericalPoint::new(r, theta, phi)
}
