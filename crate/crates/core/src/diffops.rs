//! Fourth-order central finite differences of fields in Cartesian coordinates.
//!
//! Used by the residual checks; stencils reach 2h from the evaluation point,
//! so callers keep points at least that far inside the ball.

use crate::error::Result;
use crate::geom::FieldEvaluator;

/// Default first-derivative step relative to R.
pub const DEFAULT_STEP: f64 = 1e-3;

fn shifted(x: [f64; 3], axis: usize, d: f64) -> [f64; 3] {
    let mut y = x;
    y[axis] += d;
    y
}

/// (−f(x+2h) + 8f(x+h) − 8f(x−h) + f(x−2h)) / 12h
fn stencil<T, F>(f: F, x: [f64; 3], axis: usize, h: f64) -> Result<T>
where
    F: Fn([f64; 3]) -> Result<T>,
    T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let p1 = f(shifted(x, axis, h))?;
    let m1 = f(shifted(x, axis, -h))?;
    let p2 = f(shifted(x, axis, 2.0 * h))?;
    let m2 = f(shifted(x, axis, -2.0 * h))?;
    Ok(((p1 - m1) * 8.0 - (p2 - m2)) * (1.0 / (12.0 * h)))
}

#[derive(Clone, Copy)]
struct V3([f64; 3]);

impl std::ops::Sub for V3 {
    type Output = V3;
    fn sub(self, o: V3) -> V3 {
        V3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl std::ops::Mul<f64> for V3 {
    type Output = V3;
    fn mul(self, s: f64) -> V3 {
        V3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// Jacobian J[i][a] = ∂u_i/∂x_a.
pub fn jacobian<F: FieldEvaluator + ?Sized>(f: &F, x: [f64; 3], h: f64) -> Result<[[f64; 3]; 3]> {
    let mut jac = [[0.0; 3]; 3];
    #[allow(clippy::needless_range_loop)]
    for a in 0..3 {
        let d = stencil(|y| f.eval_cartesian(y).map(V3), x, a, h)?;
        for (row, di) in jac.iter_mut().zip(d.0) {
            row[a] = di;
        }
    }
    Ok(jac)
}

pub fn curl<F: FieldEvaluator + ?Sized>(f: &F, x: [f64; 3], h: f64) -> Result<[f64; 3]> {
    let j = jacobian(f, x, h)?;
    Ok([j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]])
}

pub fn div<F: FieldEvaluator + ?Sized>(f: &F, x: [f64; 3], h: f64) -> Result<f64> {
    let j = jacobian(f, x, h)?;
    Ok(j[0][0] + j[1][1] + j[2][2])
}

/// ∇div as the gradient (step `h_outer`) of the divergence (step `h`).
pub fn grad_div<F: FieldEvaluator + ?Sized>(
    f: &F,
    x: [f64; 3],
    h: f64,
    h_outer: f64,
) -> Result<[f64; 3]> {
    let mut g = [0.0; 3];
    for (a, ga) in g.iter_mut().enumerate() {
        *ga = stencil(|y| div(f, y, h), x, a, h_outer)?;
    }
    Ok(g)
}

/// Gradient of a scalar function.
pub fn gradient<F: Fn([f64; 3]) -> f64>(g: F, x: [f64; 3], h: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (a, oa) in out.iter_mut().enumerate() {
        *oa = stencil(|y| Ok(g(y)), x, a, h).expect("infallible");
    }
    out
}

/// Scalar Laplacian with the fourth-order five-point second-difference stencil.
pub fn laplacian<F: Fn([f64; 3]) -> f64>(g: F, x: [f64; 3], h: f64) -> f64 {
    let g0 = g(x);
    let mut s = 0.0;
    for a in 0..3 {
        let p1 = g(shifted(x, a, h));
        let m1 = g(shifted(x, a, -h));
        let p2 = g(shifted(x, a, 2.0 * h));
        let m2 = g(shifted(x, a, -2.0 * h));
        s += (-p2 + 16.0 * p1 - 30.0 * g0 + 16.0 * m1 - m2) / (12.0 * h * h);
    }
    s
}
