//! Operators as diagonal coefficient transforms: powers of rot (S) and of
//! ∇div (𝒩_d), the W^m and A^{2k} scale norms and class C(2k, m) diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::ModeIndex;
use crate::quad::SpectralField;

/// Which operator a power or solve acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    /// S, diagonal on the curl families with eigenvalues ±λ_j
    #[serde(rename = "curl")]
    Curl,
    /// 𝒩_d, diagonal on the grad-div family with eigenvalues −ν_j²
    #[serde(rename = "graddiv")]
    GradDiv,
}

impl Operator {
    pub fn acts_on(self, idx: &ModeIndex) -> bool {
        idx.is_curl() == matches!(self, Operator::Curl)
    }
}

/// Operator eigenvalue of a mode: ±λ_j for curl, −ν_j² for grad-div.
pub fn eigenvalue(idx: &ModeIndex, radius: f64) -> f64 {
    idx.eigenvalue(radius)
        .expect("indices in a SpectralField are validated")
}

fn wavenumber(idx: &ModeIndex, radius: f64) -> f64 {
    idx.wavenumber(radius)
        .expect("indices in a SpectralField are validated")
}

/// Applies `op^p`. Coefficients of the other operator's family pass through
/// unchanged, so the result is (I, S^p) or (𝒩_d^p, I) on the full field.
pub fn apply_power(sf: &SpectralField, op: Operator, p: i32) -> Result<SpectralField> {
    if p == 0 {
        return Err(Error::ZeroPower);
    }
    Ok(sf.map(|idx, c| {
        if op.acts_on(idx) {
            c * eigenvalue(idx, sf.radius).powi(p)
        } else {
            c
        }
    }))
}

/// A point on one of the two Sobolev-type scales.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScaleOrder {
    /// A^{2k}; holds the even order 2k
    A(i32),
    /// W^m
    W(i32),
}

impl ScaleOrder {
    pub fn a(two_k: i32) -> Result<Self> {
        if two_k % 2 != 0 {
            return Err(Error::InvalidScaleOrder(format!(
                "A-scale order must be even, got {two_k}"
            )));
        }
        Ok(ScaleOrder::A(two_k))
    }

    pub fn w(m: i32) -> Self {
        ScaleOrder::W(m)
    }

    fn operator(self) -> Operator {
        match self {
            ScaleOrder::A(_) => Operator::GradDiv,
            ScaleOrder::W(_) => Operator::Curl,
        }
    }

    /// Weight exponent on the wavenumber: λ^{2m} on W^m, ν^{2·2k} on A^{2k}.
    fn exponent(self) -> i32 {
        match self {
            ScaleOrder::A(o) | ScaleOrder::W(o) => 2 * o,
        }
    }
}

fn weighted_terms(sf: &SpectralField, so: ScaleOrder) -> Vec<(f64, f64)> {
    let op = so.operator();
    let e = so.exponent();
    sf.iter()
        .filter(|(idx, _)| op.acts_on(idx))
        .map(|(idx, &c)| {
            let w = wavenumber(idx, sf.radius);
            (w, w.powi(e) * c * c)
        })
        .collect()
}

/// (Σ w_j^{2·order} c_j²)^{1/2} over the modes of the scale's family.
pub fn scale_norm(sf: &SpectralField, so: ScaleOrder) -> f64 {
    weighted_terms(sf, so)
        .iter()
        .map(|t| t.1)
        .sum::<f64>()
        .sqrt()
}

/// Class C(2k, m) = A^{2k} ⊕ W^m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassC {
    pub k: i32,
    pub m: i32,
}

pub const TRUNCATION_NOTE: &str = "membership in an infinite-dimensional class cannot be decided from finitely many coefficients; \
     norms and tail ratios are diagnostics of the truncated series only";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub class: ClassC,
    pub a_norm: f64,
    pub w_norm: f64,
    /// weighted mass of the top decile of grad-div modes over the total
    pub a_tail_ratio: f64,
    pub w_tail_ratio: f64,
    pub a_modes: usize,
    pub w_modes: usize,
    pub note: String,
}

/// Fraction of weighted mass carried by the last ceil(N/10) modes in
/// spectral order; 0 when the total vanishes.
fn tail_ratio(mut terms: Vec<(f64, f64)>) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = terms.iter().map(|t| t.1).sum();
    if total == 0.0 {
        return 0.0;
    }
    let tail = terms.len().div_ceil(10);
    terms[terms.len() - tail..].iter().map(|t| t.1).sum::<f64>() / total
}

pub fn class_report(sf: &SpectralField, c: ClassC) -> Result<ClassReport> {
    let a = ScaleOrder::a(2 * c.k)?;
    let w = ScaleOrder::w(c.m);
    let at = weighted_terms(sf, a);
    let wt = weighted_terms(sf, w);
    Ok(ClassReport {
        class: c,
        a_norm: scale_norm(sf, a),
        w_norm: scale_norm(sf, w),
        a_modes: at.len(),
        w_modes: wt.len(),
        a_tail_ratio: tail_ratio(at),
        w_tail_ratio: tail_ratio(wt),
        note: TRUNCATION_NOTE.to_string(),
    })
}

/// Solves op^{2·order} u = rhs on the operator's family: u = op^{−2·order} rhs.
pub fn solve_poly(rhs: &SpectralField, op: Operator, order: i32) -> Result<SpectralField> {
    if order < 1 {
        return Err(Error::InvalidScaleOrder(format!(
            "order must be >= 1, got {order}"
        )));
    }
    apply_power(rhs, op, -2 * order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots;

    fn idx(s: &str) -> ModeIndex {
        s.parse().unwrap()
    }

    #[test]
    fn powers_on_single_modes() {
        let rho = roots::rho(1, 1).unwrap();
        let sf = SpectralField::single(idx("1,1,0,+"), 1.0, 1.0);
        assert!(
            (apply_power(&sf, Operator::Curl, 1)
                .unwrap()
                .get(&idx("1,1,0,+"))
                - rho)
                .abs()
                < 1e-14
        );
        let minus = SpectralField::single(idx("1,1,0,-"), 2.0, 1.0);
        let sq = apply_power(&minus, Operator::Curl, 2).unwrap();
        assert!((sq.get(&idx("1,1,0,-")) - 2.0 * rho * rho).abs() < 1e-12);
        let odd = apply_power(&minus, Operator::Curl, 1).unwrap();
        assert!((odd.get(&idx("1,1,0,-")) + 2.0 * rho).abs() < 1e-13);
        assert!(matches!(
            apply_power(&sf, Operator::Curl, 0),
            Err(Error::ZeroPower)
        ));
    }

    #[test]
    fn complementary_family_untouched() {
        let mut sf = SpectralField::new(1.0);
        sf.set(idx("1,1,0,+"), 1.0);
        sf.set(idx("0,1,0,g"), 3.0);
        let out = apply_power(&sf, Operator::Curl, 3).unwrap();
        assert_eq!(out.get(&idx("0,1,0,g")), 3.0);
        let out = apply_power(&sf, Operator::GradDiv, -1).unwrap();
        assert_eq!(out.get(&idx("1,1,0,+")), 1.0);
        let nu = roots::alpha(0, 1).unwrap();
        assert!((out.get(&idx("0,1,0,g")) + 3.0 / (nu * nu)).abs() < 1e-15);
    }

    #[test]
    fn norms_of_single_modes() {
        let rho = roots::rho(2, 1).unwrap();
        let sf = SpectralField::single(idx("2,1,1,+"), 1.0, 1.0);
        for m in -2..=3 {
            let n = scale_norm(&sf, ScaleOrder::w(m));
            assert!((n - rho.powi(m)).abs() < 1e-12 * rho.powi(m));
        }
        assert_eq!(scale_norm(&sf, ScaleOrder::a(2).unwrap()), 0.0);
        assert!(ScaleOrder::a(3).is_err());
    }

    #[test]
    fn single_mode_class_report() {
        let sf = SpectralField::single(idx("1,1,0,+"), 1.0, 1.0);
        let rep = class_report(&sf, ClassC { k: 1, m: 1 }).unwrap();
        assert_eq!(rep.w_tail_ratio, 1.0);
        assert_eq!(rep.a_tail_ratio, 0.0);
        assert_eq!(rep.a_modes, 0);
        assert!(rep.note.contains("diagnostic"));
    }

    #[test]
    fn poly_solves() {
        let rho = roots::rho(1, 1).unwrap();
        let sf = SpectralField::single(idx("1,1,0,+"), 1.0, 1.0);
        let u = solve_poly(&sf, Operator::Curl, 1).unwrap();
        assert!((u.get(&idx("1,1,0,+")) - rho.powi(-2)).abs() < 1e-16);
        let nu = roots::alpha(1, 1).unwrap();
        let g = SpectralField::single(idx("1,1,0,g"), 1.0, 1.0);
        let u = solve_poly(&g, Operator::GradDiv, 1).unwrap();
        assert!((u.get(&idx("1,1,0,g")) - nu.powi(-4)).abs() < 1e-16);
        assert!(solve_poly(&g, Operator::GradDiv, 0).is_err());
    }
}
