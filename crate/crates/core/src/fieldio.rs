//! Grid sampling, tricubic interpolation, CSV and legacy-VTK files, and
//! streamline tracing.
//!
//! Grid layout: r_i = R(i+1)/N_r, θ_j = πj/(N_θ−1), φ_l = 2πl/N_φ, stored
//! row-major with r slowest and φ fastest.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{FieldEvaluator, SphVec, SphericalPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridDims {
    pub n_r: usize,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl GridDims {
    pub fn new(n_r: usize, n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_r < 2 || n_theta < 2 || n_phi < 2 {
            return Err(Error::InvalidOrders(format!(
                "grid dims must be >= 2, got {n_r}x{n_theta}x{n_phi}"
            )));
        }
        Ok(GridDims {
            n_r,
            n_theta,
            n_phi,
        })
    }

    pub fn len(&self) -> usize {
        self.n_r * self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn r_node(radius: f64, n: usize, i: usize) -> f64 {
    radius * ((i + 1) as f64 / n as f64)
}

fn theta_node(n: usize, j: usize) -> f64 {
    PI * (j as f64 / (n - 1) as f64)
}

fn phi_node(n: usize, l: i64) -> f64 {
    2.0 * PI * (l as f64 / n as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub radius: f64,
    pub dims: GridDims,
    pub samples: Vec<SphVec>,
}

/// Samples `field` at every grid node.
pub fn sample<F: FieldEvaluator + ?Sized>(
    field: &F,
    dims: GridDims,
    radius: f64,
) -> Result<GridField> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(Error::BadRadius(radius));
    }
    let shells: Vec<Vec<SphVec>> = (0..dims.n_r)
        .into_par_iter()
        .map(|i| {
            let mut shell = Vec::with_capacity(dims.n_theta * dims.n_phi);
            for j in 0..dims.n_theta {
                for l in 0..dims.n_phi {
                    let p = SphericalPoint::new(
                        r_node(radius, dims.n_r, i),
                        theta_node(dims.n_theta, j),
                        phi_node(dims.n_phi, l as i64),
                    );
                    let v = field.eval(&p).map_err(|e| Error::Evaluator {
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
                    shell.push(v);
                }
            }
            Ok(shell)
        })
        .collect::<Result<_>>()?;
    Ok(GridField {
        radius,
        dims,
        samples: shells.concat(),
    })
}

/// Up to four stencil nodes (index, coordinate) for one dimension.
fn stencil(
    x: f64,
    count: usize,
    node: impl Fn(i64) -> f64,
    spacing: f64,
    offset: f64,
    periodic: bool,
) -> Vec<(usize, f64)> {
    let width = count.min(4) as i64;
    let mut base = ((x - offset) / spacing).floor() as i64 - (width - 1) / 2;
    if !periodic {
        base = base.clamp(0, count as i64 - width);
    }
    (base..base + width)
        .map(|i| (i.rem_euclid(count as i64) as usize, node(i)))
        .collect()
}

fn lagrange_weights(x: f64, nodes: &[(usize, f64)]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(a, &(_, xa))| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .map(|(_, &(_, xb))| (x - xb) / (xa - xb))
                .product()
        })
        .collect()
}

impl GridField {
    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.dims.n_theta + j) * self.dims.n_phi + l
    }

    pub fn node(&self, i: usize, j: usize, l: usize) -> SphericalPoint {
        SphericalPoint::new(
            r_node(self.radius, self.dims.n_r, i),
            theta_node(self.dims.n_theta, j),
            phi_node(self.dims.n_phi, l as i64),
        )
    }

    pub fn nodes(&self) -> impl Iterator<Item = SphericalPoint> + '_ {
        let d = self.dims;
        (0..d.n_r).flat_map(move |i| {
            (0..d.n_theta).flat_map(move |j| (0..d.n_phi).map(move |l| self.node(i, j, l)))
        })
    }

    /// Tricubic Lagrange interpolation of the spherical components; periodic
    /// in φ, one-sided stencils at the r and θ edges.
    pub fn interpolate(&self, p: &SphericalPoint) -> Result<SphVec> {
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
        let d = self.dims;
        let rs = stencil(
            p.r,
            d.n_r,
            |i| r_node(self.radius, d.n_r, i as usize),
            self.radius / d.n_r as f64,
            self.radius / d.n_r as f64,
            false,
        );
        let theta = p.theta.clamp(0.0, PI);
        let ts = stencil(
            theta,
            d.n_theta,
            |j| theta_node(d.n_theta, j as usize),
            PI / (d.n_theta - 1) as f64,
            0.0,
            false,
        );
        let phi = p.phi.rem_euclid(2.0 * PI);
        let ps = stencil(
            phi,
            d.n_phi,
            |l| phi_node(d.n_phi, l),
            2.0 * PI / d.n_phi as f64,
            0.0,
            true,
        );
        let wr = lagrange_weights(p.r, &rs);
        let wt = lagrange_weights(theta, &ts);
        let wp = lagrange_weights(phi, &ps);
        let mut acc = SphVec::ZERO;
        for (a, &(i, _)) in rs.iter().enumerate() {
            for (b, &(j, _)) in ts.iter().enumerate() {
                for (c, &(l, _)) in ps.iter().enumerate() {
                    let w = wr[a] * wt[b] * wp[c];
                    if w != 0.0 {
                        acc += self.samples[self.index(i, j, l)] * w;
                    }
                }
            }
        }
        Ok(acc)
    }

    fn validate(&self) -> Result<()> {
        if self.samples.len() != self.dims.len() {
            return Err(Error::format(
                "grid",
                format!(
                    "{} samples for {} nodes",
                    self.samples.len(),
                    self.dims.len()
                ),
            ));
        }
        if let Some(k) = self.samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::format(
                "grid",
                format!("non-finite sample at row {k}"),
            ));
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::format("csv", e.to_string());
        w.write_record(["r", "theta", "phi", "u_r", "u_theta", "u_phi"])
            .map_err(csv_err)?;
        for (p, v) in self.nodes().zip(&self.samples) {
            w.write_record([p.r, p.theta, p.phi, v.r, v.theta, v.phi].map(fmt_f64))
                .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::format("csv", e.to_string()))?;
        Ok(())
    }

    /// Reads the CSV layout back; dims come from the distinct coordinate
    /// values and R from the largest radius.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(input);
        let bad = |m: String| Error::format("csv", m);
        let header = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.iter().collect::<Vec<_>>() != ["r", "theta", "phi", "u_r", "u_theta", "u_phi"] {
            return Err(bad(format!("unexpected header {header:?}")));
        }
        let mut rows = Vec::new();
        for (k, rec) in rd.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            if rec.len() != 6 {
                return Err(bad(format!("row {} has {} fields", k + 1, rec.len())));
            }
            let mut vals = [0.0; 6];
            for (slot, field) in vals.iter_mut().zip(rec.iter()) {
                *slot = field
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("row {}: bad number {field:?}", k + 1)))?;
            }
            rows.push(vals);
        }
        let distinct = |col: usize| {
            let mut v: Vec<f64> = rows.iter().map(|r| r[col]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let (rs, ts, ps) = (distinct(0), distinct(1), distinct(2));
        let radius = *rs.last().ok_or_else(|| bad("no data rows".into()))?;
        let dims = GridDims::new(rs.len(), ts.len(), ps.len())?;
        if rows.len() != dims.len() {
            return Err(bad(format!(
                "{} rows for a {}x{}x{} grid",
                rows.len(),
                dims.n_r,
                dims.n_theta,
                dims.n_phi
            )));
        }
        let gf = GridField {
            radius,
            dims,
            samples: rows.iter().map(|r| SphVec::new(r[3], r[4], r[5])).collect(),
        };
        for (k, (p, row)) in gf.nodes().zip(&rows).enumerate() {
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + b.abs());
            if !(close(row[0], p.r) && close(row[1], p.theta) && close(row[2], p.phi)) {
                return Err(bad(format!(
                    "row {} is not on the expected grid node {p:?}",
                    k + 1
                )));
            }
        }
        gf.validate()?;
        Ok(gf)
    }

    pub fn to_vtk(&self) -> String {
        let d = self.dims;
        let n = d.len();
        let mut s = String::new();
        let _ = writeln!(s, "# vtk DataFile Version 3.0");
        let _ = writeln!(
            s,
            "ballspec grid R={} dims={}x{}x{}",
            fmt_f64(self.radius),
            d.n_r,
            d.n_theta,
            d.n_phi
        );
        let _ = writeln!(s, "ASCII");
        let _ = writeln!(s, "DATASET STRUCTURED_GRID");
        let _ = writeln!(s, "DIMENSIONS {} {} {}", d.n_phi, d.n_theta, d.n_r);
        let _ = writeln!(s, "POINTS {n} double");
        for p in self.nodes() {
            push_triple(&mut s, p.to_cartesian());
        }
        let _ = writeln!(s, "POINT_DATA {n}");
        let _ = writeln!(s, "VECTORS u double");
        for (p, v) in self.nodes().zip(&self.samples) {
            push_triple(&mut s, v.to_cartesian(&p));
        }
        let _ = writeln!(s, "VECTORS u_spherical double");
        for v in &self.samples {
            push_triple(&mut s, [v.r, v.theta, v.phi]);
        }
        s
    }

    pub fn from_vtk(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::format("vtk", m.to_string());
        let mut lines = text.lines();
        if !lines.next().unwrap_or("").starts_with("# vtk DataFile") {
            return Err(bad("missing vtk signature"));
        }
        let title = lines.next().ok_or_else(|| bad("missing title"))?;
        let radius: f64 = title_value(title, "R=").ok_or_else(|| bad("title lacks R="))?;
        let dims_str = title
            .split_whitespace()
            .find_map(|t| t.strip_prefix("dims="))
            .ok_or_else(|| bad("title lacks dims="))?;
        let dv: Vec<usize> = dims_str
            .split('x')
            .map(|t| t.parse().map_err(|_| bad("bad dims")))
            .collect::<Result<_>>()?;
        if dv.len() != 3 {
            return Err(bad("bad dims"));
        }
        let dims = GridDims::new(dv[0], dv[1], dv[2])?;
        let rest: Vec<&str> = lines.collect();
        if !rest.iter().any(|l| l.trim() == "DATASET STRUCTURED_GRID") {
            return Err(bad("not a structured grid"));
        }
        let start = rest
            .iter()
            .position(|l| l.trim() == "VECTORS u_spherical double")
            .ok_or_else(|| bad("missing u_spherical block"))?;
        let nums = parse_numbers(rest[start + 1..].iter().copied(), 3 * dims.len())?;
        let gf = GridField {
            radius,
            dims,
            samples: nums
                .chunks(3)
                .map(|c| SphVec::new(c[0], c[1], c[2]))
                .collect(),
        };
        gf.validate()?;
        Ok(gf)
    }
}

impl FieldEvaluator for GridField {
    fn eval(&self, p: &SphericalPoint) -> Result<SphVec> {
        self.interpolate(p)
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_triple(s: &mut String, v: [f64; 3]) {
    let _ = writeln!(s, "{} {} {}", fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2]));
}

fn title_value(title: &str, key: &str) -> Option<f64> {
    title
        .split_whitespace()
        .find_map(|t| t.strip_prefix(key))
        .and_then(|v| v.parse().ok())
}

fn parse_numbers<'a>(lines: impl Iterator<Item = &'a str>, count: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    for line in lines {
        if out.len() == count {
            break;
        }
        for tok in line.split_whitespace() {
            out.push(
                tok.parse()
                    .map_err(|_| Error::format("vtk", format!("bad number {tok:?}")))?,
            );
        }
    }
    if out.len() != count {
        return Err(Error::format(
            "vtk",
            format!("expected {count} values, found {}", out.len()),
        ));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Boundary,
    MaxSteps,
    Stagnation,
}

impl Termination {
    fn as_str(self) -> &'static str {
        match self {
            Termination::Boundary => "boundary",
            Termination::MaxSteps => "max-steps",
            Termination::Stagnation => "stagnation",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "boundary" => Some(Termination::Boundary),
            "max-steps" => Some(Termination::MaxSteps),
            "stagnation" => Some(Termination::Stagnation),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Streamline {
    pub seed: [f64; 3],
    pub step: f64,
    /// Cartesian polyline starting at the seed
    pub points: Vec<[f64; 3]>,
    pub termination: Termination,
}

pub const STAGNATION_SPEED: f64 = 1e-12;

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn axpy(p: [f64; 3], a: f64, v: [f64; 3]) -> [f64; 3] {
    [p[0] + a * v[0], p[1] + a * v[1], p[2] + a * v[2]]
}

/// Classical RK4 in Cartesian coordinates. Stops before any stage would
/// leave the closed ball, after `max_steps` steps, or when the speed drops
/// below 1e-12.
pub fn trace_streamline<F: FieldEvaluator + ?Sized>(
    field: &F,
    radius: f64,
    seed: [f64; 3],
    step: f64,
    max_steps: usize,
) -> Result<Streamline> {
    if !(norm3(seed) <= radius) {
        return Err(Error::SeedOutsideBall(seed));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::BadStep(step));
    }
    let inside = |x: [f64; 3]| norm3(x) <= radius;
    let mut points = vec![seed];
    let mut p = seed;
    let mut termination = Termination::MaxSteps;
    for _ in 0..max_steps {
        let k1 = field.eval_cartesian(p)?;
        if norm3(k1) < STAGNATION_SPEED {
            termination = Termination::Stagnation;
            break;
        }
        let mut next = None;
        let x2 = axpy(p, 0.5 * step, k1);
        if inside(x2) {
            let k2 = field.eval_cartesian(x2)?;
            let x3 = axpy(p, 0.5 * step, k2);
            if inside(x3) {
                let k3 = field.eval_cartesian(x3)?;
                let x4 = axpy(p, step, k3);
                if inside(x4) {
                    let k4 = field.eval_cartesian(x4)?;
                    let mut q = p;
                    for a in 0..3 {
                        q[a] += step / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
                    }
                    if inside(q) {
                        next = Some(q);
                    }
                }
            }
        }
        match next {
            Some(q) => {
                points.push(q);
                p = q;
            }
            None => {
                termination = Termination::Boundary;
                break;
            }
        }
    }
    Ok(Streamline {
        seed,
        step,
        points,
        termination,
    })
}

/// Traces several seeds in parallel.
pub fn trace_streamlines<F: FieldEvaluator + ?Sized>(
    field: &F,
    radius: f64,
    seeds: &[[f64; 3]],
    step: f64,
    max_steps: usize,
) -> Result<Vec<Streamline>> {
    seeds
        .par_iter()
        .map(|&s| trace_streamline(field, radius, s, step, max_steps))
        .collect()
}

impl Streamline {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::format("csv", e.to_string());
        w.write_record(["x", "y", "z"]).map_err(csv_err)?;
        for p in &self.points {
            w.write_record(p.map(fmt_f64)).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::format("csv", e.to_string()))?;
        Ok(())
    }

    /// Reads only the polyline; seed, step and termination are not stored in CSV.
    pub fn read_csv_points<R: Read>(input: R) -> Result<Vec<[f64; 3]>> {
        let mut rd = csv::Reader::from_reader(input);
        let bad = |m: String| Error::format("csv", m);
        let mut out = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let mut p = [0.0; 3];
            for (slot, f) in p.iter_mut().zip(rec.iter()) {
                *slot = f
                    .trim()
                    .parse()
                    .map_err(|_| bad(format!("bad number {f:?}")))?;
            }
            out.push(p);
        }
        Ok(out)
    }

    pub fn to_vtk(&self) -> String {
        let n = self.points.len();
        let mut s = String::new();
        let _ = writeln!(s, "# vtk DataFile Version 3.0");
        let _ = writeln!(
            s,
            "ballspec streamline seed={},{},{} step={} termination={}",
            fmt_f64(self.seed[0]),
            fmt_f64(self.seed[1]),
            fmt_f64(self.seed[2]),
            fmt_f64(self.step),
            self.termination.as_str()
        );
        let _ = writeln!(s, "ASCII");
        let _ = writeln!(s, "DATASET POLYDATA");
        let _ = writeln!(s, "POINTS {n} double");
        for p in &self.points {
            push_triple(&mut s, *p);
        }
        if n == 0 {
            let _ = writeln!(s, "LINES 0 0");
        } else {
            let _ = writeln!(s, "LINES 1 {}", n + 1);
            let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
            let _ = writeln!(s, "{n} {}", ids.join(" "));
        }
        s
    }

    pub fn from_vtk(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::format("vtk", m.to_string());
        let lines: Vec<&str> = text.lines().collect();
        if lines.len() < 5 || !lines[0].starts_with("# vtk DataFile") {
            return Err(bad("missing vtk signature"));
        }
        let title = lines[1];
        let seed_str = title
            .split_whitespace()
            .find_map(|t| t.strip_prefix("seed="))
            .ok_or_else(|| bad("title lacks seed="))?;
        let sv: Vec<f64> = seed_str
            .split(',')
            .map(|t| t.parse().map_err(|_| bad("bad seed")))
            .collect::<Result<_>>()?;
        if sv.len() != 3 {
            return Err(bad("bad seed"));
        }
        let step = title_value(title, "step=").ok_or_else(|| bad("title lacks step="))?;
        let termination = title
            .split_whitespace()
            .find_map(|t| t.strip_prefix("termination="))
            .and_then(Termination::parse)
            .ok_or_else(|| bad("title lacks termination="))?;
        if lines[3].trim() != "DATASET POLYDATA" {
            return Err(bad("not polydata"));
        }
        let header: Vec<&str> = lines[4].split_whitespace().collect();
        if header.len() != 3 || header[0] != "POINTS" {
            return Err(bad("missing POINTS"));
        }
        let n: usize = header[1].parse().map_err(|_| bad("bad point count"))?;
        let nums = parse_numbers(lines[5..].iter().copied(), 3 * n)?;
        Ok(Streamline {
            seed: [sv[0], sv[1], sv[2]],
            step,
            points: nums.chunks(3).map(|c| [c[0], c[1], c[2]]).collect(),
            termination,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FileFormat {
    Csv,
    Vtk,
}

impl FileFormat {
    /// Guesses from the extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("vtk") => FileFormat::Vtk,
            _ => FileFormat::Csv,
        }
    }
}

/// Something that can be written as CSV or legacy VTK.
pub trait Export {
    fn write_to<W: Write>(&self, format: FileFormat, out: W) -> Result<()>;

    fn export(&self, format: FileFormat, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_to(format, &mut buf)?;
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    }
}

impl Export for GridField {
    fn write_to<W: Write>(&self, format: FileFormat, mut out: W) -> Result<()> {
        match format {
            FileFormat::Csv => self.write_csv(out),
            FileFormat::Vtk => out
                .write_all(self.to_vtk().as_bytes())
                .map_err(|e| Error::format("vtk", e.to_string())),
        }
    }
}

impl Export for Streamline {
    fn write_to<W: Write>(&self, format: FileFormat, mut out: W) -> Result<()> {
        match format {
            FileFormat::Csv => self.write_csv(out),
            FileFormat::Vtk => out
                .write_all(self.to_vtk().as_bytes())
                .map_err(|e| Error::format("vtk", e.to_string())),
        }
    }
}

pub fn import_grid(path: &Path, format: FileFormat) -> Result<GridField> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    match format {
        FileFormat::Csv => GridField::read_csv(bytes.as_slice()),
        FileFormat::Vtk => GridField::from_vtk(&String::from_utf8_lossy(&bytes)),
    }
}

pub fn import_streamline(path: &Path) -> Result<Streamline> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Streamline::from_vtk(&text)
}
