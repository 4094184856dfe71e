//! Self-checks runnable from the command line: spectra, eigen-residuals,
//! orthonormality, solver exactness, scale-norm identities and streamlines.
//!
//! Each suite returns named metrics with the threshold they were judged
//! against, so the JSON report is useful even when everything passes.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diffops;
use crate::error::{Error, Result};
use crate::fieldio::{trace_streamline, Termination};
use crate::geom::{FieldEvaluator, SphericalPoint};
use crate::modes::{enumerate, Cutoff, Family, Mode, ModeIndex};
use crate::quad::{build_quadrature, default_quadrature, gram_matrix, SpectralField};
use crate::roots::{alpha, rho};
use crate::solve::{
    random_interior_point, residual_check, resolvent_curl, solve_problem1, Problem,
};
use crate::specfun::phi;
use crate::spectral::{apply_power, scale_norm, Operator, ScaleOrder};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub radius: f64,
    /// modes in the orthonormality Gram matrix
    pub n_modes: usize,
    /// quadrature orders; None picks the defaults for the modes involved
    pub quad: Option<(usize, usize, usize)>,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            radius: 1.0,
            n_modes: 30,
            quad: None,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub metrics: BTreeMap<String, Metric>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            suite: name.to_string(),
            passed: true,
            metrics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    /// Records `value <= threshold`.
    fn at_most(&mut self, name: &str, value: f64, threshold: f64) {
        let passed = value <= threshold;
        self.passed &= passed;
        self.metrics.insert(
            name.to_string(),
            Metric {
                value,
                threshold,
                passed,
            },
        );
    }

    /// Records a boolean condition as 1/0 against threshold 0.
    fn check(&mut self, name: &str, ok: bool) {
        self.at_most(name, if ok { 0.0 } else { 1.0 }, 0.0);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

pub const SUITES: &[&str] = &[
    "spectrum",
    "multiplicity",
    "phi",
    "eigen-residual",
    "closed-form",
    "orthonormality",
    "resolvent",
    "fredholm",
    "norms",
    "resolvent-bound",
    "streamlines",
];

/// Runs one suite by name, or every suite for "all".
pub fn run(suite: &str, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(Error::InvalidMode(format!(
            "unknown suite {suite:?}; expected one of {} or all",
            SUITES.join(", ")
        )));
    };
    let suites = names
        .into_iter()
        .map(|n| run_one(n, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

fn run_one(name: &str, cfg: &VerifyConfig) -> Result<SuiteReport> {
    match name {
        "spectrum" => spectrum(),
        "multiplicity" => multiplicity(cfg),
        "phi" => phi_identity(cfg),
        "eigen-residual" => eigen_residual(cfg),
        "closed-form" => closed_form(cfg),
        "orthonormality" => orthonormality(cfg),
        "resolvent" => resolvent(cfg),
        "fredholm" => fredholm(cfg),
        "norms" => norms(cfg),
        "resolvent-bound" => resolvent_bound(cfg),
        "streamlines" => streamlines(cfg),
        _ => unreachable!("suite list checked by run"),
    }
}

fn spectrum() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("spectrum");
    rep.at_most("rho_1_1_minus_4.4934", (rho(1, 1)? - 4.4934).abs(), 1e-4);
    let mut worst_pi: f64 = 0.0;
    let mut worst_alpha: f64 = 0.0;
    for m in 1..=10 {
        worst_pi = worst_pi.max((rho(0, m)? - m as f64 * PI).abs());
        worst_alpha = worst_alpha.max((alpha(0, m)? - rho(1, m)?).abs());
    }
    rep.at_most("max_rho_0_m_minus_m_pi", worst_pi, 1e-12);
    rep.at_most("max_alpha_0_m_minus_rho_1_m", worst_alpha, 1e-12);
    Ok(rep)
}

fn multiplicity(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("multiplicity");
    let limit = (rho(4, 3)? + 1e-9) / cfg.radius;
    let modes = enumerate(
        &[Family::CurlPlus],
        Cutoff::MaxWavenumber(limit),
        cfg.radius,
    )?;
    let mut worst = 0usize;
    for n in 1..=4 {
        for m in 1..=3 {
            let target = rho(n, m)? / cfg.radius;
            let count = modes
                .iter()
                .filter(|q| (q.eigenvalue - target).abs() <= 1e-12 * target)
                .count();
            worst = worst.max(count.abs_diff(2 * n + 1));
        }
    }
    rep.at_most("max_count_deviation", worst as f64, 0.0);
    Ok(rep)
}

fn phi_identity(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("phi");
    let mut worst: f64 = 0.0;
    for (n, m) in [(1, 1), (1, 2), (2, 1), (3, 1)] {
        let lam = rho(n, m)? / cfg.radius;
        worst = worst.max(phi(n, lam, cfg.radius)?.im.abs());
    }
    rep.at_most("max_abs_im_phi", worst, 1e-8);
    Ok(rep)
}

fn cart_norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn eigen_residual(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("eigen-residual");
    let radius = cfg.radius;
    let h = diffops::DEFAULT_STEP * radius;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<[f64; 3]> = (0..50)
        .map(|_| random_interior_point(&mut rng, 0.9 * radius).to_cartesian())
        .collect();

    let curl_modes = enumerate(
        &[Family::CurlPlus, Family::CurlMinus],
        Cutoff::First(25),
        radius,
    )?;
    let (mut worst_eig, mut worst_div): (f64, f64) = (0.0, 0.0);
    for mode in &curl_modes {
        let (mut num, mut den, mut sup, mut div_max): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
        for &x in &points {
            let u = mode.eval_cartesian(x)?;
            let c = diffops::curl(mode, x, h)?;
            for a in 0..3 {
                num += (c[a] - mode.eigenvalue * u[a]).powi(2);
                den += (mode.eigenvalue * u[a]).powi(2);
            }
            sup = sup.max(cart_norm(u));
            div_max = div_max.max(diffops::div(mode, x, h)?.abs());
        }
        worst_eig = worst_eig.max((num / den).sqrt());
        worst_div = worst_div.max(div_max / sup);
    }
    rep.at_most("curl_eigen_relative", worst_eig, 1e-5);
    rep.at_most("curl_div_over_sup", worst_div, 1e-5);

    let gd_modes = enumerate(&[Family::GradDiv], Cutoff::First(15), radius)?;
    let (mut worst_gd, mut worst_rot): (f64, f64) = (0.0, 0.0);
    for mode in &gd_modes {
        let (mut num, mut den, mut sup, mut rot_max): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
        for &x in &points {
            let v = mode.eval_cartesian(x)?;
            let g = diffops::grad_div(mode, x, h, 5.0 * h)?;
            for a in 0..3 {
                num += (g[a] - mode.eigenvalue * v[a]).powi(2);
                den += (mode.eigenvalue * v[a]).powi(2);
            }
            sup = sup.max(cart_norm(v));
            rot_max = rot_max.max(cart_norm(diffops::curl(mode, x, h)?));
        }
        worst_gd = worst_gd.max((num / den).sqrt());
        worst_rot = worst_rot.max(rot_max / sup);
    }
    rep.at_most("graddiv_eigen_relative", worst_gd, 1e-4);
    rep.at_most("graddiv_curl_over_sup", worst_rot, 1e-5);
    Ok(rep)
}

/// The printed (1,1,0) field with ρ restored on the tangential components.
pub fn closed_form_110(rho: f64, p: &SphericalPoint) -> [f64; 3] {
    let x = rho * p.r;
    let (s, c) = x.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    let base = s - x * c;
    [
        2.0 * rho * base / x.powi(3) * ct,
        rho * (base - x * x * s) / x.powi(3) * st,
        rho * base / (x * x) * st,
    ]
}

fn closed_form(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("closed-form");
    let radius = cfg.radius;
    let mode = Mode::new(ModeIndex::new(Family::CurlPlus, 1, 1, 0)?, radius)?;
    let rho_r = mode.eigenvalue;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pairs = Vec::new();
    for _ in 0..100 {
        let p = SphericalPoint::new(
            radius * rng.gen_range(0.05..0.95),
            rng.gen_range(0.05..PI - 0.05),
            rng.gen_range(0.0..2.0 * PI),
        );
        let u = mode.eval(&p)?;
        pairs.push(([u.r, u.theta, u.phi], closed_form_110(rho_r, &p)));
    }
    // least-squares scalar, then pointwise relative deviation
    let (num, den) = pairs.iter().fold((0.0, 0.0), |(n, d), (u, v)| {
        (
            n + u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>(),
            d + v.iter().map(|b| b * b).sum::<f64>(),
        )
    });
    let scale = num / den;
    let worst = pairs
        .iter()
        .map(|(u, v)| {
            let sv = v.map(|b| b * scale);
            cart_norm([u[0] - sv[0], u[1] - sv[1], u[2] - sv[2]]) / cart_norm(sv)
        })
        .fold(0.0, f64::max);
    rep.at_most("max_pointwise_relative", worst, 1e-8);
    rep.notes.push(format!("global factor {scale:.12e}"));
    Ok(rep)
}

fn orthonormality(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("orthonormality");
    let modes = enumerate(&Family::ALL, Cutoff::First(cfg.n_modes.max(1)), cfg.radius)?;
    let q = match cfg.quad {
        Some((a, b, c)) => build_quadrature(a, b, c, cfg.radius)?,
        None => default_quadrature(&modes, cfg.radius)?,
    };
    let gram = gram_matrix(&modes, &q)?;
    let (mut off, mut diag): (f64, f64) = (0.0, 0.0);
    for (i, row) in gram.iter().enumerate() {
        for (j, &g) in row.iter().enumerate() {
            if i == j {
                diag = diag.max((g - 1.0).abs());
            } else {
                off = off.max(g.abs());
            }
        }
    }
    rep.at_most("max_off_diagonal", off, 1e-7);
    rep.at_most("max_diagonal_deviation", diag, 1e-6);
    let (a, b, c) = q.orders();
    rep.notes
        .push(format!("{} modes, quadrature {a}x{b}x{c}", modes.len()));
    Ok(rep)
}

fn resolvent(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("resolvent");
    let idx = ModeIndex::new(Family::CurlPlus, 1, 1, 0)?;
    let lam_j = idx.eigenvalue(cfg.radius)?;
    let f = SpectralField::single(idx, 1.0, cfg.radius);
    let out = solve_problem1(&f, 1.0, None)?;
    rep.at_most(
        "coefficient_error",
        (out.solution.get(&idx) - 1.0 / (1.0 + lam_j)).abs(),
        1e-15,
    );
    let chk = residual_check(&out.solution, &f, 1.0, Problem::One, 50, cfg.seed)?;
    rep.at_most("coef_residual", chk.coef_residual, 1e-13);
    rep.at_most("fd_residual", chk.fd_residual, 1e-4);
    Ok(rep)
}

fn fredholm(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("fredholm");
    let radius = cfg.radius;
    let n = 2;
    let lam = rho(n, 1)? / radius;
    let resonant = ModeIndex::new(Family::CurlMinus, n, 1, 1)?;
    let other = ModeIndex::new(Family::CurlPlus, 1, 1, 0)?;
    let mut bad = SpectralField::single(resonant, 0.5, radius);
    bad.set(other, 1.0);
    match resolvent_curl(&bad, lam, None) {
        Err(Error::NotSolvable(r)) => rep.check(
            "rejects_resonant_component",
            r.violated_conditions == vec![resonant],
        ),
        _ => rep.check("rejects_resonant_component", false),
    }
    let good = SpectralField::single(other, 1.0, radius);
    match resolvent_curl(&good, lam, None) {
        Ok(r) => {
            rep.at_most(
                "kernel_dimension_error",
                r.kernel_basis.len().abs_diff(2 * n + 1) as f64,
                0.0,
            );
            rep.check(
                "kernel_is_resonant_curl_minus",
                r.kernel_basis
                    .iter()
                    .all(|i| i.family == Family::CurlMinus && i.n == n && i.m == 1),
            );
        }
        Err(_) => rep.check("solvable_when_orthogonal", false),
    }
    Ok(rep)
}

/// Random coefficients on the first `count` modes of `families`.
pub fn random_field(
    families: &[Family],
    count: usize,
    radius: f64,
    rng: &mut impl Rng,
) -> Result<SpectralField> {
    let modes = enumerate(families, Cutoff::First(count), radius)?;
    Ok(SpectralField::from_pairs(
        radius,
        modes
            .into_iter()
            .map(|m| (m.index, rng.gen_range(-1.0..1.0))),
    ))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn norms(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("norms");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut worst_sym, mut worst_trip): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let count = rng.gen_range(1..40);
        let u = random_field(
            &[Family::CurlPlus, Family::CurlMinus, Family::GradDiv],
            count,
            cfg.radius,
            &mut rng,
        )?;
        for m in [1, 2] {
            let v = apply_power(&u, Operator::Curl, 2 * m)?;
            worst_sym = worst_sym.max(rel(
                scale_norm(&u, ScaleOrder::w(m)),
                scale_norm(&v, ScaleOrder::w(-m)),
            ));
        }
        for op in [Operator::Curl, Operator::GradDiv] {
            for p in [1, 2, 3] {
                let back = apply_power(&apply_power(&u, op, p)?, op, -p)?;
                let err = back.sub(&u)?.norm() / u.norm();
                worst_trip = worst_trip.max(err);
            }
        }
    }
    rep.at_most("norm_symmetry_relative", worst_sym, 1e-12);
    rep.at_most("power_round_trip_relative", worst_trip, 1e-14);
    Ok(rep)
}

/// max_j over the curl modes of (1 + λ_j^{−2m}) / |1 ± λ/λ_j|².
pub fn resolvent_bound_constant(f: &SpectralField, m: i32, lambda: f64) -> f64 {
    f.iter()
        .filter(|(i, _)| i.is_curl())
        .map(|(i, _)| {
            let lj = i.wavenumber(f.radius).expect("validated");
            let sign = if i.family == Family::CurlPlus {
                1.0
            } else {
                -1.0
            };
            (1.0 + lj.powi(-2 * m)) / (1.0 + sign * lambda / lj).powi(2)
        })
        .fold(0.0, f64::max)
}

fn resolvent_bound(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("resolvent-bound");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut violations = 0usize;
    let mut worst_ratio: f64 = 0.0;
    for trial in 0..1000 {
        let count = rng.gen_range(1..40);
        let f = random_field(
            &[Family::CurlPlus, Family::CurlMinus],
            count,
            cfg.radius,
            &mut rng,
        )?;
        let m = (trial % 3) as i32;
        let lambda = [0.5, 1.0, 10.0][(trial / 3) % 3];
        let u = resolvent_curl(&f, lambda, None)?.solution;
        let lhs = scale_norm(&u, ScaleOrder::w(m + 1)).powi(2);
        let rhs =
            resolvent_bound_constant(&f, m, lambda) * scale_norm(&f, ScaleOrder::w(m)).powi(2);
        worst_ratio = worst_ratio.max(lhs / rhs);
        if lhs > rhs {
            violations += 1;
        }
    }
    rep.at_most("violations", violations as f64, 0.0);
    rep.notes
        .push(format!("largest lhs/rhs ratio {worst_ratio:.6}"));
    Ok(rep)
}

fn streamlines(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("streamlines");
    let radius = cfg.radius;
    let mode = Mode::new(ModeIndex::new(Family::CurlPlus, 1, 1, 0)?, radius)?;
    let step = 1e-3 * radius;

    let axis = trace_streamline(&mode, radius, [0.0, 0.0, -0.5 * radius], step, 200_000)?;
    let drift = axis
        .points
        .iter()
        .map(|p| p[0].hypot(p[1]))
        .fold(0.0, f64::max);
    let monotone = axis.points.windows(2).all(|w| w[1][2] > w[0][2]);
    let top = axis.points.last().map_or(f64::NAN, |p| p[2]);
    rep.at_most("axis_max_distance", drift, 1e-6);
    rep.check("axis_z_strictly_increasing", monotone);
    rep.at_most("axis_final_gap_to_north_pole", radius - top, 0.01 * radius);

    let off = trace_streamline(&mode, radius, [0.5 * radius, 0.0, 0.0], step, 100_000)?;
    let r_max = off.points.iter().map(|&p| cart_norm(p)).fold(0.0, f64::max);
    let dist: Vec<f64> = off.points.iter().map(|p| p[0].hypot(p[1])).collect();
    let d_min = dist.iter().copied().fold(f64::INFINITY, f64::min);
    rep.check(
        "off_axis_ran_all_steps",
        off.termination == Termination::MaxSteps && off.points.len() == 100_001,
    );
    rep.at_most("off_axis_max_radius_over_R", r_max / radius, 0.99);
    rep.check("off_axis_stays_off_axis", d_min > 0.0);
    rep.notes.push(format!(
        "off-axis orbit: |x| <= {:.6}R, axis distance in [{:.6}, {:.6}]R",
        r_max / radius,
        d_min / radius,
        dist.iter().copied().fold(0.0, f64::max) / radius
    ));
    Ok(rep)
}

/// Evaluates `f` on random interior points, for quick smoke checks.
pub fn sample_points<F: FieldEvaluator + ?Sized>(
    f: &F,
    radius: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<[f64; 3]>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| f.eval_cartesian(random_interior_point(&mut rng, radius).to_cartesian()))
        .collect()
}
