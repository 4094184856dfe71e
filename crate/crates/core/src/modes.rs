//! Eigenmodes of curl and grad-div on the ball of radius R.
//!
//! Curl modes (n ≥ 1, signed eigenvalue λ = ±ρₙ,ₘ/R):
//!
//! ```text
//! u_r           = c (λr)⁻¹ ψₙ(λr) Yₙᵏ
//! u_φ + i u_θ   = c (λr)⁻¹ Φₙ(λr) H Yₙᵏ
//! ```
//!
//! which is the Re/Im expansion of the tangential part written as one complex
//! product. This reading satisfies rot u = λu, div u = 0 and u_r = 0 on the
//! boundary; the finite-difference eigen-residual tests pin it down.
//!
//! Grad-div modes (n ≥ 0, ∇div v = −ν² v with ν = αₙ,ₘ/R) are v = ∇g with
//! g = c ψₙ(νr) Yₙᵏ:
//!
//! ```text
//! v_r           = c ν ψₙ′(νr) Yₙᵏ
//! v_φ + i v_θ   = c r⁻¹ ψₙ(νr) H Yₙᵏ
//! ```
//!
//! Harmonics are real, so every mode is a real field; c > 0 is fixed by unit
//! L₂ norm on the ball.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{LazyLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{FieldEvaluator, SphVec, SphericalPoint};
use crate::quad::gauss_legendre;
use crate::roots::{self, RootKind, MAX_ROOT_INDEX};
use crate::specfun::{
    real_harmonic, sph_jn, sph_jn_over_z, sph_jn_prime, Angular, PhiIntegrator, MAX_DEGREE,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "curl+")]
    CurlPlus,
    #[serde(rename = "curl-")]
    CurlMinus,
    #[serde(rename = "graddiv")]
    GradDiv,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::CurlPlus, Family::CurlMinus, Family::GradDiv];

    pub fn is_curl(self) -> bool {
        !matches!(self, Family::GradDiv)
    }

    pub fn root_kind(self) -> RootKind {
        if self.is_curl() {
            RootKind::Psi
        } else {
            RootKind::PsiPrime
        }
    }

    fn symbol(self) -> char {
        match self {
            Family::CurlPlus => '+',
            Family::CurlMinus => '-',
            Family::GradDiv => 'g',
        }
    }

    fn min_degree(self) -> usize {
        if self.is_curl() {
            1
        } else {
            0
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::CurlPlus => "curl+",
            Family::CurlMinus => "curl-",
            Family::GradDiv => "graddiv",
        })
    }
}

/// Multi-index (n, m, k) plus family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub k: i32,
}

impl ModeIndex {
    pub fn new(family: Family, n: usize, m: usize, k: i32) -> Result<Self> {
        let idx = ModeIndex { family, n, m, k };
        idx.validate()?;
        Ok(idx)
    }

    pub fn validate(&self) -> Result<()> {
        if self.family.is_curl() && self.n == 0 {
            return Err(Error::InvalidMode(format!(
                "{self}: curl modes need n >= 1"
            )));
        }
        if self.n > MAX_DEGREE {
            return Err(Error::InvalidMode(format!("{self}: n > {MAX_DEGREE}")));
        }
        if self.m == 0 || self.m > MAX_ROOT_INDEX {
            return Err(Error::InvalidMode(format!(
                "{self}: m must lie in 1..={MAX_ROOT_INDEX}"
            )));
        }
        if self.k.unsigned_abs() as usize > self.n {
            return Err(Error::InvalidMode(format!("{self}: |k| > n")));
        }
        Ok(())
    }

    pub fn is_curl(&self) -> bool {
        self.family.is_curl()
    }

    /// ρₙ,ₘ/R or αₙ,ₘ/R.
    pub fn wavenumber(&self, radius: f64) -> Result<f64> {
        Ok(roots::zero(self.family.root_kind(), self.n, self.m)? / radius)
    }

    /// Signed curl eigenvalue ±λ, or −ν² for grad-div.
    pub fn eigenvalue(&self, radius: f64) -> Result<f64> {
        let w = self.wavenumber(radius)?;
        Ok(match self.family {
            Family::CurlPlus => w,
            Family::CurlMinus => -w,
            Family::GradDiv => -w * w,
        })
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.n,
            self.m,
            self.k,
            self.family.symbol()
        )
    }
}

/// Parses `n,m,k,{+|-|g}`.
impl FromStr for ModeIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || Error::InvalidMode(format!("expected n,m,k,{{+|-|g}}, got {s:?}"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let n = parts[0].parse().map_err(|_| bad())?;
        let m = parts[1].parse().map_err(|_| bad())?;
        let k = parts[2].parse().map_err(|_| bad())?;
        let family = match parts[3] {
            "+" => Family::CurlPlus,
            "-" => Family::CurlMinus,
            "g" => Family::GradDiv,
            _ => return Err(bad()),
        };
        ModeIndex::new(family, n, m, k)
    }
}

/// Radial factors at one radius, before the angular part and the constant c.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialProfile {
    /// multiplies Y for the radial component
    pub radial: f64,
    /// multiplies H Y for u_φ + i u_θ
    pub tangential: Complex64,
}

impl RadialProfile {
    pub fn combine(&self, ang: &Angular, scale: f64) -> SphVec {
        let w = self.tangential * ang.h() * scale;
        SphVec::new(self.radial * ang.y * scale, w.im, w.re)
    }
}

static NORMALIZATION: LazyLock<RwLock<HashMap<(Family, usize, usize, u64), f64>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// A normalized eigenmode on a ball of fixed radius.
#[derive(Clone, Debug)]
pub struct Mode {
    pub index: ModeIndex,
    pub eigenvalue: f64,
    /// ρ/R for curl, α/R for grad-div
    pub wavenumber: f64,
    pub normalization: f64,
    pub radius: f64,
    phi: Option<PhiIntegrator>,
}

fn check_radius(radius: f64) -> Result<()> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::BadRadius(radius));
    }
    Ok(())
}

impl Mode {
    pub fn new(index: ModeIndex, radius: f64) -> Result<Self> {
        index.validate()?;
        check_radius(radius)?;
        let wavenumber = index.wavenumber(radius)?;
        let eigenvalue = index.eigenvalue(radius)?;
        let phi = index
            .is_curl()
            .then(|| PhiIntegrator::new(index.n, eigenvalue, radius));
        let mut mode = Mode {
            index,
            eigenvalue,
            wavenumber,
            normalization: 1.0,
            radius,
            phi,
        };
        let key = (index.family, index.n, index.m, radius.to_bits());
        let cached = NORMALIZATION
            .read()
            .expect("cache poisoned")
            .get(&key)
            .copied();
        mode.normalization = match cached {
            Some(c) => c,
            None => {
                let c = 1.0 / mode.unnormalized_norm_sq().sqrt();
                NORMALIZATION
                    .write()
                    .expect("cache poisoned")
                    .insert(key, c);
                c
            }
        };
        Ok(mode)
    }

    pub fn family(&self) -> Family {
        self.index.family
    }

    /// Radial factors with c = 1.
    pub fn radial_profile(&self, r: f64) -> RadialProfile {
        let n = self.index.n;
        if let Some(phi) = &self.phi {
            let lam = self.eigenvalue;
            let x = lam * r;
            let radial = sph_jn_over_z(n, x);
            let tangential = if r < 1e-6 * self.radius {
                // n(n+1) Φₙ = d/dr[r ψₙ(λr)] + iλr ψₙ(λr), exact near the origin
                Complex64::new(radial + sph_jn_prime(n, x), sph_jn(n, x)) / (n * (n + 1)) as f64
            } else {
                phi.eval(r) / x
            };
            RadialProfile { radial, tangential }
        } else {
            let nu = self.wavenumber;
            let x = nu * r;
            let tangential = if n == 0 {
                0.0
            } else {
                nu * sph_jn_over_z(n, x)
            };
            RadialProfile {
                radial: nu * sph_jn_prime(n, x),
                tangential: Complex64::new(tangential, 0.0),
            }
        }
    }

    pub fn angular(&self, theta: f64, phi: f64) -> Angular {
        real_harmonic(self.index.n, self.index.k, theta, phi).expect("validated index")
    }

    /// ‖u‖² with c = 1. The angular integrals are ∫Y² = 1 and ∫|HY|² = n(n+1),
    /// leaving a radial integral done with composite Gauss panels.
    fn unnormalized_norm_sq(&self) -> f64 {
        let nn = (self.index.n * (self.index.n + 1)) as f64;
        let integrand = |r: f64| {
            let p = self.radial_profile(r);
            (p.radial * p.radial + nn * p.tangential.norm_sqr()) * r * r
        };
        let rule = gauss_legendre(16);
        let mut panels = ((2.0 * self.wavenumber * self.radius).ceil() as usize).max(4);
        let integrate = |panels: usize| {
            let width = self.radius / panels as f64;
            let mut acc = 0.0;
            for p in 0..panels {
                let mid = (p as f64 + 0.5) * width;
                let mut s = 0.0;
                for &(x, w) in &rule {
                    s += w * integrand(mid + 0.5 * width * x);
                }
                acc += 0.5 * width * s;
            }
            acc
        };
        let mut prev = integrate(panels);
        for _ in 0..6 {
            panels *= 2;
            let next = integrate(panels);
            let done = (next - prev).abs() <= 1e-14 * next.abs();
            prev = next;
            if done {
                break;
            }
        }
        prev
    }

    fn check_point(&self, p: &SphericalPoint) -> Result<()> {
        if !(p.r >= 0.0 && p.r <= self.radius * (1.0 + 1e-12))
            || !p.theta.is_finite()
            || !p.phi.is_finite()
        {
            return Err(Error::OutsideBall {
                r: p.r,
                theta: p.theta,
                radius: self.radius,
            });
        }
        Ok(())
    }

    /// The field with c = 1, i.e. the formulas as written without normalization.
    pub fn eval_unnormalized(&self, p: &SphericalPoint) -> Result<SphVec> {
        self.check_point(p)?;
        let prof = self.radial_profile(p.r);
        Ok(prof.combine(&self.angular(p.theta, p.phi), 1.0))
    }
}

impl FieldEvaluator for Mode {
    fn eval(&self, p: &SphericalPoint) -> Result<SphVec> {
        self.check_point(p)?;
        let prof = self.radial_profile(p.r);
        Ok(prof.combine(&self.angular(p.theta, p.phi), self.normalization))
    }
}

pub fn eval_curl_mode(mode: &Mode, p: &SphericalPoint) -> Result<SphVec> {
    if !mode.index.is_curl() {
        return Err(Error::WrongFamily {
            expected: "curl",
            got: mode.index,
        });
    }
    mode.eval(p)
}

pub fn eval_graddiv_mode(mode: &Mode, p: &SphericalPoint) -> Result<SphVec> {
    if mode.index.is_curl() {
        return Err(Error::WrongFamily {
            expected: "graddiv",
            got: mode.index,
        });
    }
    mode.eval(p)
}

/// Positive scale factor c giving the mode unit L₂ norm (memoized).
pub fn normalization_constant(index: ModeIndex, radius: f64) -> Result<f64> {
    Ok(Mode::new(index, radius)?.normalization)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cutoff {
    /// every mode with wavenumber ≤ Λ
    MaxWavenumber(f64),
    /// the first N modes in spectral order
    First(usize),
}

/// (n, m) pairs of one family with wavenumber ≤ `limit`.
fn pairs_below(family: Family, limit: f64, radius: f64) -> Result<Vec<(usize, usize, f64)>> {
    let kind = family.root_kind();
    let mut out = Vec::new();
    for n in family.min_degree()..=MAX_DEGREE {
        if roots::zero(kind, n, 1)? / radius > limit {
            // α₀,₁ exceeds α₁,₁; from n = 1 on the first zero grows with n
            if n == 0 {
                continue;
            }
            break;
        }
        for m in 1..=MAX_ROOT_INDEX {
            let w = roots::zero(kind, n, m)? / radius;
            if w > limit {
                break;
            }
            out.push((n, m, w));
        }
    }
    Ok(out)
}

/// Indices of all modes in `families` with wavenumber ≤ `limit`, in spectral
/// order: wavenumber, then (n, m, k, family).
pub fn indices_below(
    families: &[Family],
    limit: f64,
    radius: f64,
) -> Result<Vec<(ModeIndex, f64)>> {
    let mut fams: Vec<Family> = families.to_vec();
    fams.sort();
    fams.dedup();
    let mut out = Vec::new();
    for &family in &fams {
        for (n, m, w) in pairs_below(family, limit, radius)? {
            for k in -(n as i32)..=(n as i32) {
                out.push((ModeIndex { family, n, m, k }, w));
            }
        }
    }
    out.sort_by(|a, b| {
        a.1.total_cmp(&b.1)
            .then(a.0.n.cmp(&b.0.n))
            .then(a.0.m.cmp(&b.0.m))
            .then(a.0.k.cmp(&b.0.k))
            .then(a.0.family.cmp(&b.0.family))
    });
    Ok(out)
}

/// Modes sorted by |wavenumber| ascending.
///
/// For curl families the wavenumber is |eigenvalue|; for grad-div it is
/// ν = sqrt(|eigenvalue|), so mixed lists interleave by the common −Δ scale.
pub fn enumerate(families: &[Family], cutoff: Cutoff, radius: f64) -> Result<Vec<Mode>> {
    check_radius(radius)?;
    if families.is_empty() {
        return Err(Error::InvalidCutoff("no families requested".into()));
    }
    let indices = match cutoff {
        Cutoff::MaxWavenumber(limit) => {
            if !(limit > 0.0) || !limit.is_finite() {
                return Err(Error::InvalidCutoff(format!("Λ = {limit}")));
            }
            indices_below(families, limit, radius)?
        }
        Cutoff::First(count) => {
            if count == 0 {
                return Err(Error::InvalidCutoff("N = 0".into()));
            }
            let mut limit = 4.0 / radius;
            loop {
                let found = indices_below(families, limit, radius)?;
                if found.len() >= count {
                    break found.into_iter().take(count).collect();
                }
                limit *= 1.5;
            }
        }
    };
    indices
        .into_iter()
        .map(|(idx, _)| Mode::new(idx, radius))
        .collect()
}
