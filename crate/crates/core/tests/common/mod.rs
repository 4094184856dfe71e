//! Test-side oracles shared by the integration tests. Nothing here calls the
//! library's differentiation or special-function code.
#![allow(dead_code)]

use ballspec::FieldEvaluator;

pub type V3 = [f64; 3];

pub fn norm(v: V3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn at(f: &dyn FieldEvaluator, x: V3) -> V3 {
    f.eval_cartesian(x).expect("evaluation inside the ball")
}

/// ∂u/∂x_axis by the five-point fourth-order central difference.
pub fn partial(f: &dyn FieldEvaluator, x: V3, axis: usize, h: f64) -> V3 {
    let shifted = |d: f64| {
        let mut y = x;
        y[axis] += d;
        at(f, y)
    };
    let (m2, m1, p1, p2) = (shifted(-2.0 * h), shifted(-h), shifted(h), shifted(2.0 * h));
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
    }
    out
}

pub fn fd_curl(f: &dyn FieldEvaluator, x: V3, h: f64) -> V3 {
    let dx = partial(f, x, 0, h);
    let dy = partial(f, x, 1, h);
    let dz = partial(f, x, 2, h);
    [dy[2] - dz[1], dz[0] - dx[2], dx[1] - dy[0]]
}

pub fn fd_div(f: &dyn FieldEvaluator, x: V3, h: f64) -> f64 {
    partial(f, x, 0, h)[0] + partial(f, x, 1, h)[1] + partial(f, x, 2, h)[2]
}

/// ∇div as a fourth-order gradient (step `outer`) of the FD divergence.
pub fn fd_grad_div(f: &dyn FieldEvaluator, x: V3, h: f64, outer: f64) -> V3 {
    let mut out = [0.0; 3];
    for (a, slot) in out.iter_mut().enumerate() {
        let d = |s: f64| {
            let mut y = x;
            y[a] += s;
            fd_div(f, y, h)
        };
        *slot =
            (d(-2.0 * outer) - 8.0 * d(-outer) + 8.0 * d(outer) - d(2.0 * outer)) / (12.0 * outer);
    }
    out
}

/// Scalar Laplacian, fourth-order stencil on each axis.
pub fn fd_laplacian(g: &dyn Fn(V3) -> f64, x: V3, h: f64) -> f64 {
    let g0 = g(x);
    let mut s = 0.0;
    for a in 0..3 {
        let v = |d: f64| {
            let mut y = x;
            y[a] += d;
            g(y)
        };
        s += (-v(2.0 * h) + 16.0 * v(h) - 30.0 * g0 + 16.0 * v(-h) - v(-2.0 * h)) / (12.0 * h * h);
    }
    s
}

/// Deterministic points uniformly distributed in the ball of radius `r_max`.
pub fn interior_points(count: usize, r_max: f64, seed: u64) -> Vec<V3> {
    // splitmix64, kept local so the sampling does not share code with the library
    let mut state = seed;
    let mut next = move || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = [2.0 * next() - 1.0, 2.0 * next() - 1.0, 2.0 * next() - 1.0];
        if norm(p) < 1.0 {
            out.push(scale(p, r_max));
        }
    }
    out
}

/// m-th positive zero of `f` on a uniform scan from `lo`, bisected to full precision.
pub fn bisect_zero(f: impl Fn(f64) -> f64, lo: f64, step: f64, m: usize) -> f64 {
    let mut a = lo;
    let mut found = 0;
    loop {
        let b = a + step;
        if f(a).signum() != f(b).signum() {
            found += 1;
            if found == m {
                let (mut x0, mut x1) = (a, b);
                for _ in 0..200 {
                    let mid = 0.5 * (x0 + x1);
                    if f(mid).signum() == f(x0).signum() {
                        x0 = mid;
                    } else {
                        x1 = mid;
                    }
                }
                return 0.5 * (x0 + x1);
            }
        }
        a = b;
    }
}

/// ψ₁(z) = sin z / z² − cos z / z.
pub fn psi1(z: f64) -> f64 {
    z.sin() / (z * z) - z.cos() / z
}
