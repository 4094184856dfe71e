//! Scalar special functions behind every eigenfield formula.
//!
//! `psi` is the spherical Bessel function of the first kind written through
//! the Rayleigh formula, ψₙ(z) = (−z)ⁿ (d/z dz)ⁿ (sin z / z). The radial
//! integral Φₙ carries the tangential part of the curl eigenfields, and the
//! angular operators
//!
//! ```text
//! H v = (sin⁻¹θ ∂_φ + i ∂_θ) v
//! K w = sin⁻¹θ (∂_θ sin θ + i ∂_φ) w
//! ```
//!
//! act on scalar functions on the unit sphere. Spherical harmonics are real
//! and orthonormal on S², without the Condon–Shortley phase.

use std::f64::consts::PI;
use std::sync::LazyLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

/// Largest supported degree n.
pub const MAX_DEGREE: usize = 64;

static PANEL_RULE: LazyLock<Vec<(f64, f64)>> = LazyLock::new(|| gauss_legendre(16));

fn check_degree(n: usize) -> Result<()> {
    if n > MAX_DEGREE {
        return Err(Error::DegreeOutOfRange(n));
    }
    Ok(())
}

fn check_positive(z: f64) -> Result<()> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::BadArgument(z));
    }
    Ok(())
}

/// ψₙ(z) for `z > 0`.
pub fn psi(n: usize, z: f64) -> Result<f64> {
    check_degree(n)?;
    check_positive(z)?;
    Ok(sph_jn(n, z))
}

/// dψₙ/dz for `z > 0`.
pub fn psi_prime(n: usize, z: f64) -> Result<f64> {
    check_degree(n)?;
    check_positive(z)?;
    Ok(sph_jn_prime(n, z))
}

/// ψₙ on the whole real line. ψₙ(−z) = (−1)ⁿ ψₙ(z).
pub(crate) fn sph_jn(n: usize, z: f64) -> f64 {
    if z < 0.0 {
        let v = sph_jn(n, -z);
        return if n & 1 == 0 { v } else { -v };
    }
    if z == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if n == 0 {
        return z.sin() / z;
    }
    if z < 0.5 {
        ascending_series(n, z)
    } else if z >= n as f64 {
        upward(n, z)
    } else {
        miller(n, z)
    }
}

/// zⁿ/(2n+1)!! · Σ (−z²/2)ʲ / (j! (2n+3)(2n+5)…(2n+2j+1)).
fn ascending_series(n: usize, z: f64) -> f64 {
    let mut lead = 1.0;
    for i in 1..=n {
        lead *= z / (2 * i + 1) as f64;
    }
    let h = -0.5 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..40 {
        term *= h / (j as f64 * (2 * n + 2 * j + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    lead * sum
}

fn upward(n: usize, z: f64) -> f64 {
    let (s, c) = z.sin_cos();
    let mut prev = s / z;
    let mut cur = s / (z * z) - c / z;
    for k in 1..n {
        let next = (2 * k + 1) as f64 / z * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn miller(n: usize, z: f64) -> f64 {
    const BIG: f64 = 1e250;
    let start = n + 30 + n / 2;
    let mut above = 0.0;
    let mut cur = 1.0;
    let mut at_n = 0.0;
    let mut at_1 = 0.0;
    for k in (1..=start).rev() {
        let below = (2 * k + 1) as f64 / z * cur - above;
        above = cur;
        cur = below;
        if k - 1 == n {
            at_n = cur;
        }
        if k - 1 == 1 {
            at_1 = cur;
        }
        if cur.abs() > BIG {
            cur /= BIG;
            above /= BIG;
            at_n /= BIG;
            at_1 /= BIG;
        }
    }
    let (s, c) = z.sin_cos();
    if z < 1.0 || s.abs() > 0.5 {
        at_n * (s / z) / cur
    } else {
        at_n * (s / (z * z) - c / z) / at_1
    }
}

/// ψₙ′ on the whole real line.
pub(crate) fn sph_jn_prime(n: usize, z: f64) -> f64 {
    if z < 0.0 {
        let v = sph_jn_prime(n, -z);
        return if n % 2 == 1 { v } else { -v };
    }
    if z == 0.0 {
        return if n == 1 { 1.0 / 3.0 } else { 0.0 };
    }
    if n == 0 {
        if z >= 0.5 {
            let (s, c) = z.sin_cos();
            return (z * c - s) / (z * z);
        }
        return -sph_jn(1, z);
    }
    sph_jn(n - 1, z) - (n + 1) as f64 / z * sph_jn(n, z)
}

/// ψₙ(z)/z with the finite limit at the origin (n ≥ 1).
pub(crate) fn sph_jn_over_z(n: usize, z: f64) -> f64 {
    if z == 0.0 {
        return match n {
            0 => f64::INFINITY,
            1 => 1.0 / 3.0,
            _ => 0.0,
        };
    }
    sph_jn(n, z) / z
}

/// Φₙ(λr) = ∫₀ʳ e^{iλ(r−t)} ψₙ(λt) t⁻¹ dt.
pub fn phi(n: usize, lam: f64, r: f64) -> Result<Complex64> {
    check_degree(n)?;
    if n == 0 {
        return Err(Error::SingularDegree);
    }
    if lam == 0.0 || !lam.is_finite() {
        return Err(Error::ZeroLambda);
    }
    if !r.is_finite() || r < 0.0 {
        return Err(Error::BadArgument(r));
    }
    Ok(PhiIntegrator::new(n, lam, r).eval(r))
}

/// Composite 16-point Gauss rule for Φₙ with a panel density calibrated once
/// at the largest radius it will be asked for.
///
/// Calibration doubles the density until two successive rules agree to
/// 1e-12; every later evaluation reuses the accepted density, so nearby radii
/// see the same rule and the result is smooth in r.
#[derive(Clone, Debug)]
pub struct PhiIntegrator {
    n: usize,
    lam: f64,
    density: f64,
}

impl PhiIntegrator {
    pub fn new(n: usize, lam: f64, r_max: f64) -> Self {
        let mut this = PhiIntegrator {
            n,
            lam,
            density: 1.0,
        };
        if r_max <= 0.0 {
            return this;
        }
        loop {
            let coarse = this.integrate(this.density, r_max);
            let fine = this.integrate(2.0 * this.density, r_max);
            if (coarse - fine).norm() < 1e-12 || this.density >= 256.0 {
                break;
            }
            this.density *= 2.0;
        }
        this
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lam
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        self.integrate(self.density, r)
    }

    fn integrate(&self, density: f64, r: f64) -> Complex64 {
        if r <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let panels = ((density * self.lam.abs() * r).ceil() as usize).max(2);
        let width = r / panels as f64;
        let half = 0.5 * width;
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * width;
            let mut panel = Complex64::new(0.0, 0.0);
            for &(x, w) in PANEL_RULE.iter() {
                let t = mid + half * x;
                let radial = self.lam * sph_jn_over_z(self.n, self.lam * t);
                panel += w * radial * Complex64::cis(self.lam * (r - t));
            }
            acc += panel * half;
        }
        acc
    }
}

/// A real spherical harmonic together with the two derivatives that H needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angular {
    pub y: f64,
    /// ∂_θ Y
    pub dtheta: f64,
    /// sin⁻¹θ ∂_φ Y, finite at the poles
    pub dphi_over_sin: f64,
}

impl Angular {
    /// H Y = sin⁻¹θ ∂_φ Y + i ∂_θ Y.
    pub fn h(&self) -> Complex64 {
        Complex64::new(self.dphi_over_sin, self.dtheta)
    }
}

/// Fully normalized Q̄ₙᵏ(x) = N dᵏPₙ/dxᵏ, so that P̄ₙᵏ(θ) = sinᵏθ · Q̄ₙᵏ(cos θ).
fn legendre_q(n: usize, k: usize, x: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut qkk = 1.0 / (4.0 * PI).sqrt();
    for i in 1..=k {
        qkk *= ((2 * i + 1) as f64 / (2 * i) as f64).sqrt();
    }
    if n == k {
        return qkk;
    }
    let mut prev = qkk;
    let mut cur = x * ((2 * k + 3) as f64).sqrt() * qkk;
    let k2 = (k * k) as f64;
    for l in (k + 2)..=n {
        let l2 = (l * l) as f64;
        let a = ((4.0 * l2 - 1.0) / (l2 - k2)).sqrt();
        let b = ((((l - 1) * (l - 1)) as f64 - k2) * (2 * l + 1) as f64
            / ((2 * l - 3) as f64 * (l2 - k2)))
            .sqrt();
        let next = a * x * cur - b * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Real orthonormal harmonic Yₙᵏ: k > 0 pairs with cos kφ, k < 0 with sin |k|φ.
pub fn real_harmonic(n: usize, k: i32, theta: f64, phi_ang: f64) -> Result<Angular> {
    check_degree(n)?;
    let kk = k.unsigned_abs() as usize;
    if kk > n {
        return Err(Error::OrderExceedsDegree { n, k });
    }
    let (s, x) = theta.sin_cos();
    let q = legendre_q(n, kk, x);
    let q_next = legendre_q(n, kk + 1, x);
    let p = s.powi(kk as i32) * q;
    let mut dp = -s.powi(kk as i32 + 1) * (((n + kk + 1) * (n - kk)) as f64).sqrt() * q_next;
    let mut p_over_s = 0.0;
    if kk > 0 {
        let s_km1 = s.powi(kk as i32 - 1);
        dp += kk as f64 * s_km1 * x * q;
        p_over_s = s_km1 * q;
    }
    if k == 0 {
        return Ok(Angular {
            y: p,
            dtheta: dp,
            dphi_over_sin: 0.0,
        });
    }
    let (sin_k, cos_k) = (kk as f64 * phi_ang).sin_cos();
    let root2 = std::f64::consts::SQRT_2;
    Ok(if k > 0 {
        Angular {
            y: root2 * p * cos_k,
            dtheta: root2 * dp * cos_k,
            dphi_over_sin: -root2 * kk as f64 * p_over_s * sin_k,
        }
    } else {
        Angular {
            y: root2 * p * sin_k,
            dtheta: root2 * dp * sin_k,
            dphi_over_sin: root2 * kk as f64 * p_over_s * cos_k,
        }
    })
}

pub fn ylm(n: usize, k: i32, theta: f64, phi_ang: f64) -> Result<f64> {
    real_harmonic(n, k, theta, phi_ang).map(|a| a.y)
}

/// (H Yₙᵏ)(θ, φ) from closed-form Legendre derivatives.
pub fn h_op_ylm(n: usize, k: i32, theta: f64, phi_ang: f64) -> Result<Complex64> {
    real_harmonic(n, k, theta, phi_ang).map(|a| a.h())
}

/// K w by central differences. Only the verification code uses this.
pub fn k_op<F>(w: F, theta: f64, phi_ang: f64) -> Result<Complex64>
where
    F: Fn(f64, f64) -> Complex64,
{
    let h = 1e-5_f64.min(0.5 * theta).min(0.5 * (PI - theta));
    if !(h >= 1e-9) {
        return Err(Error::PoleTooClose(theta));
    }
    let sin_w = |t: f64| w(t, phi_ang) * t.sin();
    let d_theta = (sin_w(theta + h) - sin_w(theta - h)) / (2.0 * h);
    let d_phi = (w(theta, phi_ang + h) - w(theta, phi_ang - h)) / (2.0 * h);
    Ok((d_theta + Complex64::i() * d_phi) / theta.sin())
}
