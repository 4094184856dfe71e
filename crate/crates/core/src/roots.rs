//! Positive zeros of ψₙ (curl spectrum, ρₙ,ₘ) and of ψₙ′ (grad-div spectrum,
//! αₙ,ₘ).
//!
//! Zeros are located by a sign-change scan with step π/8 starting at
//! max(n/2, 0.05), narrowed by bisection to width 1e-6 and polished with
//! Newton's method. Results are cached per (kind, n); the scan grid does not
//! depend on how many zeros were requested, so a cached value is bit-identical
//! to a fresh computation.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::{LazyLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{sph_jn, sph_jn_prime, MAX_DEGREE};

pub const MAX_ROOT_INDEX: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RootKind {
    /// zeros of ψₙ
    #[serde(rename = "psi-zero")]
    Psi,
    /// zeros of ψₙ′
    #[serde(rename = "psi-prime-zero")]
    PsiPrime,
}

impl RootKind {
    fn value(self, n: usize, z: f64) -> f64 {
        match self {
            RootKind::Psi => sph_jn(n, z),
            RootKind::PsiPrime => sph_jn_prime(n, z),
        }
    }

    fn slope(self, n: usize, z: f64) -> f64 {
        match self {
            RootKind::Psi => sph_jn_prime(n, z),
            // z²ψ'' + 2zψ' + (z² − n(n+1))ψ = 0
            RootKind::PsiPrime => {
                let nn = (n * (n + 1)) as f64;
                -2.0 / z * sph_jn_prime(n, z) - (1.0 - nn / (z * z)) * sph_jn(n, z)
            }
        }
    }
}

static CACHE: LazyLock<RwLock<HashMap<(RootKind, usize), Vec<f64>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// m-th positive zero of ψₙ.
pub fn rho(n: usize, m: usize) -> Result<f64> {
    zero(RootKind::Psi, n, m)
}

/// m-th positive zero of ψₙ′.
pub fn alpha(n: usize, m: usize) -> Result<f64> {
    zero(RootKind::PsiPrime, n, m)
}

pub fn zero(kind: RootKind, n: usize, m: usize) -> Result<f64> {
    if n > MAX_DEGREE || m == 0 || m > MAX_ROOT_INDEX {
        return Err(Error::RootOutOfRange { n, m });
    }
    if let Some(v) = CACHE
        .read()
        .expect("root cache poisoned")
        .get(&(kind, n))
        .and_then(|zs| zs.get(m - 1))
    {
        return Ok(*v);
    }
    let zs = compute_zeros(kind, n, m)?;
    let z = zs[m - 1];
    let mut cache = CACHE.write().expect("root cache poisoned");
    let slot = cache.entry((kind, n)).or_default();
    if zs.len() > slot.len() {
        *slot = zs;
    }
    Ok(z)
}

fn scan_start(n: usize) -> f64 {
    (0.5 * n as f64).max(0.05)
}

fn compute_zeros(kind: RootKind, n: usize, count: usize) -> Result<Vec<f64>> {
    let step = PI / 8.0;
    let start = scan_start(n);
    let end = (count as f64 + 0.5 * n as f64 + 2.0) * PI;
    let mut out = Vec::with_capacity(count);
    let mut i = 0usize;
    let mut lo = start;
    let mut f_lo = kind.value(n, lo);
    while out.len() < count {
        i += 1;
        let hi = start + i as f64 * step;
        if hi > end {
            return Err(Error::Bracketing {
                kind,
                n,
                m: out.len() + 1,
                lo: start,
                hi: end,
            });
        }
        let f_hi = kind.value(n, hi);
        if f_lo == 0.0 {
            out.push(lo);
        } else if f_lo * f_hi < 0.0 {
            out.push(polish(kind, n, lo, hi, f_lo));
        }
        lo = hi;
        f_lo = f_hi;
    }
    Ok(out)
}

fn polish(kind: RootKind, n: usize, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > 1e-6 {
        let mid = 0.5 * (a + b);
        let fm = kind.value(n, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let mut z = 0.5 * (a + b);
    for _ in 0..50 {
        let f = kind.value(n, z);
        let d = kind.slope(n, z);
        if f == 0.0 {
            return z;
        }
        let next = z - f / d;
        if !(next > a && next < b) {
            return bisect_to_end(kind, n, a, b, fa);
        }
        let done = (next - z).abs() <= 1e-13 * z.max(1.0);
        z = next;
        if done {
            break;
        }
    }
    z
}

fn bisect_to_end(kind: RootKind, n: usize, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            return mid;
        }
        let fm = kind.value(n, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
}

/// A table of zeros, exportable as JSON for reuse outside the library.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootTable {
    pub kind: RootKind,
    #[serde(rename = "R")]
    pub radius: f64,
    pub entries: Vec<RootEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootEntry {
    pub n: usize,
    pub m: usize,
    pub z: f64,
}

impl RootTable {
    /// Zeros for n in `n_min..=n_max` and m in `1..=m_max`.
    pub fn build(
        kind: RootKind,
        n_min: usize,
        n_max: usize,
        m_max: usize,
        radius: f64,
    ) -> Result<Self> {
        let mut entries = Vec::new();
        for n in n_min..=n_max {
            for m in 1..=m_max {
                entries.push(RootEntry {
                    n,
                    m,
                    z: zero(kind, n, m)?,
                });
            }
        }
        Ok(RootTable {
            kind,
            radius,
            entries,
        })
    }

    pub fn get(&self, n: usize, m: usize) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.n == n && e.m == m)
            .map(|e| e.z)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisection_oracle<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
        let mut fa = f(a);
        while b - a > 1e-13 {
            let m = 0.5 * (a + b);
            let fm = f(m);
            if (fm < 0.0) == (fa < 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn zeroth_order_zeros_are_multiples_of_pi() {
        for m in 1..=10 {
            assert!((rho(0, m).unwrap() - m as f64 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn first_curl_root() {
        assert!((rho(1, 1).unwrap() - 4.4934).abs() < 1e-4);
    }

    #[test]
    fn second_root_of_tan_z_equals_z() {
        // ψ₁ = 0  ⇔  tan z = z; sin z − z cos z changes sign on (π, 3π) only at the roots
        let g = |z: f64| z.sin() - z * z.cos();
        let first = bisection_oracle(g, PI, 1.5 * PI);
        let second = bisection_oracle(g, 2.0 * PI, 2.5 * PI);
        assert!((rho(1, 1).unwrap() - first).abs() < 1e-12);
        assert!((rho(1, 2).unwrap() - second).abs() < 1e-12);
    }

    #[test]
    fn graddiv_zeros() {
        for m in 1..=12 {
            assert!((alpha(0, m).unwrap() - rho(1, m).unwrap()).abs() < 1e-12);
        }
        // ψ₁′ = 0 ⇔ 2 sin z − 2z cos z − z² sin z = 0 (times z³)
        let g = |z: f64| 2.0 * z.sin() - 2.0 * z * z.cos() - z * z * z.sin();
        let oracle = bisection_oracle(g, 0.1, PI);
        assert!((alpha(1, 1).unwrap() - oracle).abs() < 1e-12);
        assert!(sph_jn_prime(2, alpha(2, 1).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn residuals_small_over_supported_range() {
        for n in [0usize, 1, 7, 20, 40, 64] {
            for m in [1usize, 2, 5, 30, 256] {
                let z = rho(n, m).unwrap();
                assert!(sph_jn(n, z).abs() < 1e-10, "rho({n},{m})");
                let a = alpha(n, m).unwrap();
                assert!(sph_jn_prime(n, a).abs() < 1e-10, "alpha({n},{m})");
            }
        }
    }

    #[test]
    fn zero_counting_matches_sign_changes() {
        for n in 0..=10usize {
            let zmax = 60.0;
            let mut count = 0;
            let mut z = PI / 8.0;
            let mut prev = sph_jn(n, z);
            while z + PI / 8.0 <= zmax {
                z += PI / 8.0;
                let cur = sph_jn(n, z);
                if prev * cur < 0.0 {
                    count += 1;
                }
                prev = cur;
            }
            let mut roots = 0;
            while rho(n, roots + 1).unwrap() <= z {
                roots += 1;
            }
            assert_eq!(roots, count, "n={n}");
        }
    }

    #[test]
    fn interlacing_and_monotone() {
        for n in 0..15usize {
            for m in 1..20usize {
                let a = rho(n, m).unwrap();
                let b = rho(n + 1, m).unwrap();
                let c = rho(n, m + 1).unwrap();
                assert!(a < b && b < c, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn cached_values_are_bit_identical() {
        let a = rho(9, 3).unwrap();
        let b = rho(9, 40).unwrap();
        let again = rho(9, 3).unwrap();
        assert_eq!(a.to_bits(), again.to_bits());
        let fresh = compute_zeros(RootKind::Psi, 9, 3).unwrap()[2];
        assert_eq!(a.to_bits(), fresh.to_bits());
        assert!(b > a);
    }

    #[test]
    fn concurrent_fills_agree() {
        let handles: Vec<_> = (0..8)
            .map(|i| std::thread::spawn(move || alpha(11, 5 + i).unwrap()))
            .collect();
        let vals: Vec<f64> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for (i, v) in vals.iter().enumerate() {
            assert_eq!(v.to_bits(), alpha(11, 5 + i).unwrap().to_bits());
        }
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(matches!(rho(65, 1), Err(Error::RootOutOfRange { .. })));
        assert!(matches!(rho(1, 0), Err(Error::RootOutOfRange { .. })));
        assert!(matches!(alpha(1, 257), Err(Error::RootOutOfRange { .. })));
    }

    #[test]
    fn table_json_shape() {
        let t = RootTable::build(RootKind::Psi, 0, 1, 2, 1.0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(v["kind"], "psi-zero");
        assert_eq!(v["R"], 1.0);
        assert_eq!(v["entries"].as_array().unwrap().len(), 4);
        assert_eq!(v["entries"][2]["n"], 1);
        let back = RootTable::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
    }
}
