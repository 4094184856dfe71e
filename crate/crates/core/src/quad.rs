//! Tensor-product quadrature on the ball, inner products, projection onto the
//! eigenbasis and synthesis of truncated series.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fs;
use std::num::NonZeroUsize;
use std::path::Path;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{FieldEvaluator, SphVec, SphericalPoint};
use crate::modes::{Family, Mode, ModeIndex, RadialProfile};
use crate::specfun::{real_harmonic, Angular};

/// Gauss–Legendre (node, weight) pairs on [−1, 1], nodes ascending.
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(n.max(1)).expect("nonzero");
    let mut rule: Vec<(f64, f64)> = GaussLegendre::new(n).as_node_weight_pairs().to_vec();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

pub const DEFAULT_ORDERS: (usize, usize, usize) = (48, 48, 96);

#[derive(Clone, Debug, PartialEq)]
pub struct BallQuadrature {
    pub radius: f64,
    /// radial nodes in (0, R)
    pub r: Vec<f64>,
    /// radial weights including the r² Jacobian
    pub wr: Vec<f64>,
    pub theta: Vec<f64>,
    /// weights in cos θ
    pub wtheta: Vec<f64>,
    pub phi: Vec<f64>,
    pub wphi: f64,
}

/// Nodes r_i ∈ (0, R), cos θ_j Gauss–Legendre, φ_l = 2πl/N_φ.
pub fn build_quadrature(
    n_r: usize,
    n_theta: usize,
    n_phi: usize,
    radius: f64,
) -> Result<BallQuadrature> {
    if n_r < 2 || n_theta < 2 || n_phi < 4 {
        return Err(Error::InvalidOrders(format!(
            "need N_r, N_theta >= 2 and N_phi >= 4, got {n_r}x{n_theta}x{n_phi}"
        )));
    }
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::BadRadius(radius));
    }
    let half = 0.5 * radius;
    let (r, wr) = gauss_legendre(n_r)
        .into_iter()
        .map(|(x, w)| {
            let r = half * (x + 1.0);
            (r, half * w * r * r)
        })
        .unzip();
    // descending cos θ gives ascending θ
    let (theta, wtheta) = gauss_legendre(n_theta)
        .into_iter()
        .rev()
        .map(|(x, w)| (x.acos(), w))
        .unzip();
    let phi = (0..n_phi)
        .map(|l| 2.0 * PI * l as f64 / n_phi as f64)
        .collect();
    Ok(BallQuadrature {
        radius,
        r,
        wr,
        theta,
        wtheta,
        phi,
        wphi: 2.0 * PI / n_phi as f64,
    })
}

/// Default orders, scaled up linearly once max(n, m) exceeds 8.
pub fn default_quadrature(modes: &[Mode], radius: f64) -> Result<BallQuadrature> {
    let top = modes
        .iter()
        .map(|m| m.index.n.max(m.index.m))
        .max()
        .unwrap_or(0);
    let scale = (top as f64 / 8.0).max(1.0);
    let (a, b, c) = DEFAULT_ORDERS;
    let s = |v: usize| (v as f64 * scale).ceil() as usize;
    build_quadrature(s(a), s(b), s(c), radius)
}

impl BallQuadrature {
    pub fn orders(&self) -> (usize, usize, usize) {
        (self.r.len(), self.theta.len(), self.phi.len())
    }

    pub fn len(&self) -> usize {
        self.r.len() * self.theta.len() * self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_weight(&self) -> f64 {
        self.wr.iter().sum::<f64>()
            * self.wtheta.iter().sum::<f64>()
            * self.wphi
            * self.phi.len() as f64
    }

    /// Quadrature sum of a scalar integrand.
    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&SphericalPoint) -> f64 + Sync,
    {
        self.shell_sums(|i| {
            let mut s = 0.0;
            for (j, &t) in self.theta.iter().enumerate() {
                for &p in &self.phi {
                    s += self.wtheta[j] * f(&SphericalPoint::new(self.r[i], t, p));
                }
            }
            Ok(s * self.wphi)
        })
        .expect("infallible")
    }

    /// Σ_i wr_i · shell(i), shells computed in parallel and summed in order.
    fn shell_sums<F>(&self, shell: F) -> Result<f64>
    where
        F: Fn(usize) -> Result<f64> + Sync,
    {
        let parts: Vec<f64> = (0..self.r.len())
            .into_par_iter()
            .map(|i| shell(i).map(|s| self.wr[i] * s))
            .collect::<Result<_>>()?;
        Ok(parts.iter().sum())
    }

    fn angular_table(&self, n: usize, k: i32) -> Vec<Angular> {
        let mut out = Vec::with_capacity(self.theta.len() * self.phi.len());
        for &t in &self.theta {
            for &p in &self.phi {
                out.push(real_harmonic(n, k, t, p).expect("validated index"));
            }
        }
        out
    }

    fn angular_weight(&self, jl: usize) -> f64 {
        self.wtheta[jl / self.phi.len()] * self.wphi
    }
}

fn eval_at<F: FieldEvaluator + ?Sized>(f: &F, p: &SphericalPoint) -> Result<SphVec> {
    let v = f.eval(p).map_err(|e| Error::Evaluator {
        r: p.r,
        theta: p.theta,
        phi: p.phi,
        message: e.to_string(),
    })?;
    if !v.is_finite() {
        return Err(Error::Evaluator {
            r: p.r,
            theta: p.theta,
            phi: p.phi,
            message: "non-finite value".into(),
        });
    }
    Ok(v)
}

/// ∫ f·g dV under `q`. Symmetric bitwise in (f, g).
pub fn inner_product<F, G>(f: &F, g: &G, q: &BallQuadrature) -> Result<f64>
where
    F: FieldEvaluator + ?Sized,
    G: FieldEvaluator + ?Sized,
{
    q.shell_sums(|i| {
        let mut s = 0.0;
        for (j, &t) in q.theta.iter().enumerate() {
            let mut ring = 0.0;
            for &p in &q.phi {
                let pt = SphericalPoint::new(q.r[i], t, p);
                let a = eval_at(f, &pt)?;
                let b = eval_at(g, &pt)?;
                ring += a.r * b.r + a.theta * b.theta + a.phi * b.phi;
            }
            s += q.wtheta[j] * ring;
        }
        Ok(s * q.wphi)
    })
}

/// Separable profiles of one normalized mode on the quadrature grid.
struct ModeTable {
    radial: Vec<f64>,
    tangential: Vec<Complex64>,
    n: usize,
    k: i32,
}

impl ModeTable {
    fn new(mode: &Mode, q: &BallQuadrature) -> Self {
        let c = mode.normalization;
        let (radial, tangential) =
            q.r.iter()
                .map(|&r| {
                    let p = mode.radial_profile(r);
                    (c * p.radial, c * p.tangential)
                })
                .unzip();
        ModeTable {
            radial,
            tangential,
            n: mode.index.n,
            k: mode.index.k,
        }
    }
}

/// ⟨a, b⟩ for two modes via the separable form
/// Σ_i w_i [ra·rb·∫YaYb + Re(ta·conj(tb)·∫HYa·conj(HYb))].
pub fn mode_inner_product(a: &Mode, b: &Mode, q: &BallQuadrature) -> Result<f64> {
    check_radius(q.radius, a.radius)?;
    check_radius(q.radius, b.radius)?;
    let gram = gram_matrix(&[a.clone(), b.clone()], q)?;
    Ok(gram[0][1])
}

/// Full Gram matrix of `modes` under `q`.
pub fn gram_matrix(modes: &[Mode], q: &BallQuadrature) -> Result<Vec<Vec<f64>>> {
    for m in modes {
        check_radius(q.radius, m.radius)?;
    }
    let tables: Vec<ModeTable> = modes.par_iter().map(|m| ModeTable::new(m, q)).collect();
    let mut angular: HashMap<(usize, i32), Vec<Angular>> = HashMap::new();
    for t in &tables {
        angular
            .entry((t.n, t.k))
            .or_insert_with(|| q.angular_table(t.n, t.k));
    }
    let keys: Vec<(usize, i32)> = {
        let mut k: Vec<_> = angular.keys().copied().collect();
        k.sort();
        k
    };
    // angular overlaps ∫YaYb and ∫HYa·conj(HYb) for every pair of (n, k)
    let pairs: Vec<((usize, i32), (usize, i32))> = keys
        .iter()
        .flat_map(|&a| keys.iter().map(move |&b| (a, b)))
        .collect();
    let overlaps: HashMap<_, (f64, Complex64)> = pairs
        .par_iter()
        .map(|&(ka, kb)| {
            let ya = &angular[&ka];
            let yb = &angular[&kb];
            let mut syy = 0.0;
            let mut shh = Complex64::new(0.0, 0.0);
            for jl in 0..ya.len() {
                let w = q.angular_weight(jl);
                syy += w * ya[jl].y * yb[jl].y;
                shh += w * ya[jl].h() * yb[jl].h().conj();
            }
            ((ka, kb), (syy, shh))
        })
        .collect();
    let n = modes.len();
    let mut gram = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a..n {
            let ta = &tables[a];
            let tb = &tables[b];
            let (syy, shh) = overlaps[&((ta.n, ta.k), (tb.n, tb.k))];
            let mut s = 0.0;
            for i in 0..q.r.len() {
                let t = ta.tangential[i] * tb.tangential[i].conj() * shh;
                s += q.wr[i] * (ta.radial[i] * tb.radial[i] * syy + t.re);
            }
            gram[a][b] = s;
            gram[b][a] = s;
        }
    }
    Ok(gram)
}

fn check_radius(expected: f64, got: f64) -> Result<()> {
    if (expected - got).abs() > 1e-12 * expected.abs() {
        return Err(Error::RadiusMismatch(expected, got));
    }
    Ok(())
}

/// Coefficients ⟨f, q_mode⟩ for every mode.
pub fn project<F>(f: &F, modes: &[Mode], q: &BallQuadrature) -> Result<SpectralField>
where
    F: FieldEvaluator + ?Sized,
{
    if modes.is_empty() {
        return Err(Error::InvalidMode(
            "projection onto an empty mode list".into(),
        ));
    }
    for m in modes {
        check_radius(q.radius, m.radius)?;
    }
    let (nr, nt, np) = q.orders();
    // samples[i][jl]: radial component and u_φ + i u_θ, pre-weighted by the angular weight
    let samples: Vec<Vec<(f64, Complex64)>> = (0..nr)
        .into_par_iter()
        .map(|i| {
            let mut shell = Vec::with_capacity(nt * np);
            for &t in &q.theta {
                for &p in &q.phi {
                    let v = eval_at(f, &SphericalPoint::new(q.r[i], t, p))?;
                    shell.push((v.r, Complex64::new(v.phi, v.theta)));
                }
            }
            Ok(shell)
        })
        .collect::<Result<_>>()?;

    let tables: Vec<ModeTable> = modes.par_iter().map(|m| ModeTable::new(m, q)).collect();
    let mut keys: Vec<(usize, i32)> = tables.iter().map(|t| (t.n, t.k)).collect();
    keys.sort();
    keys.dedup();
    // per (n, k): A_i = ∫ f_r Y, B_i = ∫ w_f conj(HY) on shell i
    let moments: HashMap<(usize, i32), Vec<(f64, Complex64)>> = keys
        .par_iter()
        .map(|&(n, k)| {
            let ang = q.angular_table(n, k);
            let per_shell = samples
                .iter()
                .map(|shell| {
                    let mut a = 0.0;
                    let mut b = Complex64::new(0.0, 0.0);
                    for (jl, &(fr, wf)) in shell.iter().enumerate() {
                        let w = q.angular_weight(jl);
                        a += w * fr * ang[jl].y;
                        b += w * wf * ang[jl].h().conj();
                    }
                    (a, b)
                })
                .collect();
            ((n, k), per_shell)
        })
        .collect();

    let mut sf = SpectralField::new(q.radius);
    for (mode, t) in modes.iter().zip(&tables) {
        let mom = &moments[&(t.n, t.k)];
        let mut s = 0.0;
        for (i, &(a, b)) in mom.iter().enumerate().take(nr) {
            s += q.wr[i] * (t.radial[i] * a + (b * t.tangential[i].conj()).re);
        }
        sf.set(mode.index, s);
    }
    Ok(sf)
}

/// A truncated eigenbasis series: ball radius plus coefficients by mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldJson", into = "FieldJson")]
pub struct SpectralField {
    pub radius: f64,
    pub coefficients: BTreeMap<ModeIndex, f64>,
}

#[derive(Clone, Serialize, Deserialize)]
struct FieldJson {
    #[serde(rename = "R")]
    radius: f64,
    modes: Vec<ModeJson>,
}

#[derive(Clone, Serialize, Deserialize)]
struct ModeJson {
    family: Family,
    n: usize,
    m: usize,
    k: i32,
    c: f64,
}

impl SpectralField {
    pub fn new(radius: f64) -> Self {
        SpectralField {
            radius,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn single(index: ModeIndex, c: f64, radius: f64) -> Self {
        let mut sf = SpectralField::new(radius);
        sf.set(index, c);
        sf
    }

    pub fn from_pairs(radius: f64, pairs: impl IntoIterator<Item = (ModeIndex, f64)>) -> Self {
        SpectralField {
            radius,
            coefficients: pairs.into_iter().collect(),
        }
    }

    pub fn set(&mut self, index: ModeIndex, c: f64) {
        self.coefficients.insert(index, c);
    }

    pub fn get(&self, index: &ModeIndex) -> f64 {
        self.coefficients.get(index).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ModeIndex, &f64)> {
        self.coefficients.iter()
    }

    /// Euclidean norm of the coefficients, the L₂ norm of the series.
    pub fn norm(&self) -> f64 {
        self.coefficients
            .values()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|_, c| s * c)
    }

    pub fn map<F: Fn(&ModeIndex, f64) -> f64>(&self, f: F) -> Self {
        SpectralField {
            radius: self.radius,
            coefficients: self
                .coefficients
                .iter()
                .map(|(i, &c)| (*i, f(i, c)))
                .collect(),
        }
    }

    /// a·self + b·other over the union of supports.
    pub fn lin_comb(&self, a: f64, other: &SpectralField, b: f64) -> Result<Self> {
        check_radius(self.radius, other.radius)?;
        let mut out = self.scaled(a);
        for (i, &c) in &other.coefficients {
            *out.coefficients.entry(*i).or_insert(0.0) += b * c;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.lin_comb(1.0, other, -1.0)
    }

    pub fn restrict<P: Fn(Family) -> bool>(&self, keep: P) -> Self {
        SpectralField {
            radius: self.radius,
            coefficients: self
                .coefficients
                .iter()
                .filter(|(i, _)| keep(i.family))
                .map(|(i, &c)| (*i, c))
                .collect(),
        }
    }

    /// The solenoidal part (curl families).
    pub fn curl_part(&self) -> Self {
        self.restrict(Family::is_curl)
    }

    /// The potential part (grad-div family).
    pub fn graddiv_part(&self) -> Self {
        self.restrict(|f| !f.is_curl())
    }

    pub fn modes(&self) -> Result<Vec<Mode>> {
        self.coefficients
            .keys()
            .map(|&i| Mode::new(i, self.radius))
            .collect()
    }

    /// A pointwise evaluator with the modes built once.
    pub fn evaluator(&self) -> Result<SeriesField> {
        Ok(SeriesField {
            radius: self.radius,
            terms: self
                .coefficients
                .iter()
                .map(|(&i, &c)| Ok((Mode::new(i, self.radius)?, c)))
                .collect::<Result<_>>()?,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&s)
    }
}

impl From<SpectralField> for FieldJson {
    fn from(sf: SpectralField) -> Self {
        FieldJson {
            radius: sf.radius,
            modes: sf
                .coefficients
                .iter()
                .map(|(i, &c)| ModeJson {
                    family: i.family,
                    n: i.n,
                    m: i.m,
                    k: i.k,
                    c,
                })
                .collect(),
        }
    }
}

impl TryFrom<FieldJson> for SpectralField {
    type Error = Error;

    fn try_from(doc: FieldJson) -> Result<Self> {
        if !doc.radius.is_finite() || doc.radius <= 0.0 {
            return Err(Error::BadRadius(doc.radius));
        }
        let mut sf = SpectralField::new(doc.radius);
        for m in doc.modes {
            let idx = ModeIndex::new(m.family, m.n, m.m, m.k)?;
            if !m.c.is_finite() {
                return Err(Error::format(
                    "spectral-field JSON",
                    format!("non-finite coefficient at {idx}"),
                ));
            }
            sf.set(idx, m.c);
        }
        Ok(sf)
    }
}

/// Σ c_j q_j as a field evaluator.
#[derive(Clone, Debug)]
pub struct SeriesField {
    radius: f64,
    terms: Vec<(Mode, f64)>,
}

impl FieldEvaluator for SeriesField {
    fn eval(&self, p: &SphericalPoint) -> Result<SphVec> {
        if !(p.r >= 0.0 && p.r <= self.radius * (1.0 + 1e-12)) {
            return Err(Error::OutsideBall {
                r: p.r,
                theta: p.theta,
                radius: self.radius,
            });
        }
        let mut acc = SphVec::ZERO;
        // modes differing only in k share the radial profile, modes with equal (n, k) the harmonic
        let mut angular: HashMap<(usize, i32), Angular> = HashMap::new();
        let mut radial: HashMap<(Family, usize, usize), RadialProfile> = HashMap::new();
        for (mode, c) in &self.terms {
            let idx = mode.index;
            let ang = *angular
                .entry((idx.n, idx.k))
                .or_insert_with(|| mode.angular(p.theta, p.phi));
            let prof = *radial
                .entry((idx.family, idx.n, idx.m))
                .or_insert_with(|| mode.radial_profile(p.r));
            acc += prof.combine(&ang, c * mode.normalization);
        }
        Ok(acc)
    }
}

/// Σ coefficients · (normalized eigenfield at p).
pub fn synthesize(sf: &SpectralField, p: &SphericalPoint) -> Result<SphVec> {
    sf.evaluator()?.eval(p)
}
