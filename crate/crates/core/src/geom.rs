//! Points, vectors and the field-evaluator trait shared by every module.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// A point in spherical coordinates (r, θ, φ).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    pub fn new(r: f64, theta: f64, phi: f64) -> Self {
        SphericalPoint { r, theta, phi }
    }

    pub fn from_cartesian(x: [f64; 3]) -> Self {
        let rho2 = x[0] * x[0] + x[1] * x[1];
        let r = (rho2 + x[2] * x[2]).sqrt();
        let theta = rho2.sqrt().atan2(x[2]);
        let mut phi = x[1].atan2(x[0]);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        SphericalPoint { r, theta, phi }
    }

    pub fn to_cartesian(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.r * st * cp, self.r * st * sp, self.r * ct]
    }
}

/// Vector components in the local frame (i_r, i_θ, i_φ).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SphVec {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphVec {
    pub const ZERO: SphVec = SphVec {
        r: 0.0,
        theta: 0.0,
        phi: 0.0,
    };

    pub fn new(r: f64, theta: f64, phi: f64) -> Self {
        SphVec { r, theta, phi }
    }

    pub fn dot(&self, other: &SphVec) -> f64 {
        self.r * other.r + self.theta * other.theta + self.phi * other.phi
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.r.is_finite() && self.theta.is_finite() && self.phi.is_finite()
    }

    /// Cartesian components of this vector attached at `at`.
    pub fn to_cartesian(&self, at: &SphericalPoint) -> [f64; 3] {
        let (st, ct) = at.theta.sin_cos();
        let (sp, cp) = at.phi.sin_cos();
        [
            self.r * st * cp + self.theta * ct * cp - self.phi * sp,
            self.r * st * sp + self.theta * ct * sp + self.phi * cp,
            self.r * ct - self.theta * st,
        ]
    }

    pub fn from_cartesian(v: [f64; 3], at: &SphericalPoint) -> Self {
        let (st, ct) = at.theta.sin_cos();
        let (sp, cp) = at.phi.sin_cos();
        SphVec {
            r: v[0] * st * cp + v[1] * st * sp + v[2] * ct,
            theta: v[0] * ct * cp + v[1] * ct * sp - v[2] * st,
            phi: -v[0] * sp + v[1] * cp,
        }
    }
}

impl Add for SphVec {
    type Output = SphVec;
    fn add(self, o: SphVec) -> SphVec {
        SphVec::new(self.r + o.r, self.theta + o.theta, self.phi + o.phi)
    }
}

impl Sub for SphVec {
    type Output = SphVec;
    fn sub(self, o: SphVec) -> SphVec {
        SphVec::new(self.r - o.r, self.theta - o.theta, self.phi - o.phi)
    }
}

impl AddAssign for SphVec {
    fn add_assign(&mut self, o: SphVec) {
        self.r += o.r;
        self.theta += o.theta;
        self.phi += o.phi;
    }
}

impl Mul<f64> for SphVec {
    type Output = SphVec;
    fn mul(self, s: f64) -> SphVec {
        SphVec::new(self.r * s, self.theta * s, self.phi * s)
    }
}

/// A vector field on the ball, (r, θ, φ) ↦ (u_r, u_θ, u_φ).
pub trait FieldEvaluator: Sync {
    fn eval(&self, p: &SphericalPoint) -> Result<SphVec>;

    /// Cartesian components at a Cartesian point.
    fn eval_cartesian(&self, x: [f64; 3]) -> Result<[f64; 3]> {
        let p = SphericalPoint::from_cartesian(x);
        Ok(self.eval(&p)?.to_cartesian(&p))
    }
}

impl<T: FieldEvaluator + ?Sized> FieldEvaluator for &T {
    fn eval(&self, p: &SphericalPoint) -> Result<SphVec> {
        (**self).eval(p)
    }
}

/// Adapts an infallible closure into a [`FieldEvaluator`].
pub struct FnField<F>(pub F);

impl<F> FieldEvaluator for FnField<F>
where
    F: Fn(&SphericalPoint) -> SphVec + Sync,
{
    fn eval(&self, p: &SphericalPoint) -> Result<SphVec> {
        Ok((self.0)(p))
    }
}

/// The zero field.
pub struct ZeroField;

impl FieldEvaluator for ZeroField {
    fn eval(&self, _p: &SphericalPoint) -> Result<SphVec> {
        Ok(SphVec::ZERO)
    }
}
