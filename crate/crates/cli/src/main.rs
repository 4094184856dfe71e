//! `ballspec` command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure or unsolvable right side,
//! 2 usage error, 3 I/O or malformed input.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ballspec::fieldio::{import_grid, sample, trace_streamline, Export, FileFormat, GridDims};
use ballspec::quad::{build_quadrature, default_quadrature};
use ballspec::solve::residual_check;
use ballspec::verify::{self, VerifyConfig};
use ballspec::{
    enumerate, project, solve_problem1, solve_problem2, solve_problem3, Cutoff, Error, Family,
    FieldEvaluator, Mode, ModeIndex, Problem, RootKind, RootTable, SpectralField, SphericalPoint,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

const OUT_DIR_ENV: &str = "BALLSPEC_OUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "ballspec",
    version,
    about = "Curl and grad-div eigenbases on the ball"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Default)]
struct Common {
    /// ball radius R
    #[arg(long, global = true)]
    radius: Option<f64>,
    /// truncate to the first N modes
    #[arg(long, global = true)]
    n_modes: Option<usize>,
    /// truncate to modes with wavenumber at most this value
    #[arg(long, global = true)]
    lambda_max: Option<f64>,
    /// quadrature orders as NrxNtxNp, e.g. 48x48x96
    #[arg(long, global = true)]
    quad: Option<String>,
    /// resonance band for the solvers
    #[arg(long, global = true)]
    eps_spec: Option<f64>,
    /// output file; relative paths resolve against $BALLSPEC_OUT_DIR when set
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key=value file with defaults for the flags above (and seed)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Zeros of psi_n or psi_n' for degrees n_min..=n_max, m = 1..=m_max
    Roots {
        kind: Kind,
        n_max: usize,
        m_max: usize,
        /// lowest degree printed; defaults to n_max
        #[arg(long)]
        n_min: Option<usize>,
        /// also write the table as JSON to this path
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Evaluate one normalized mode at a point or on a grid
    Eval {
        /// mode as n,m,k,{+|-|g}
        #[arg(long)]
        mode: String,
        /// spherical point r,theta,phi
        #[arg(long, conflicts_with = "grid")]
        point: Option<String>,
        /// grid dims NrxNtxNp; written to --out (CSV or .vtk)
        #[arg(long)]
        grid: Option<String>,
    },
    /// Project a sampled field (CSV or VTK grid) onto the eigenbasis
    Project {
        #[arg(long)]
        input: PathBuf,
        /// families to project on: curl+, curl-, graddiv (default all)
        #[arg(long, value_delimiter = ',')]
        families: Vec<FamilyArg>,
    },
    /// Solve problem 1, 2 or 3 for a spectral right side
    Solve {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        problem: u8,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// right side in the spectral-field JSON format
        #[arg(long)]
        rhs: PathBuf,
        /// also report coefficient and finite-difference residuals
        #[arg(long)]
        check: bool,
        /// seed for the residual sample points
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the self-check suites and print a JSON report
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Trace a streamline of one mode and write it as CSV or VTK
    Streamlines {
        #[arg(long)]
        mode: String,
        /// Cartesian seed point x,y,z
        #[arg(long, allow_hyphen_values = true)]
        seed: String,
        /// step relative to R
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
        /// output format when writing to stdout
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Psi,
    PsiPrime,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Vtk,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    #[value(name = "curl+")]
    CurlPlus,
    #[value(name = "curl-")]
    CurlMinus,
    Graddiv,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::CurlPlus => Family::CurlPlus,
            FamilyArg::CurlMinus => Family::CurlMinus,
            FamilyArg::Graddiv => Family::GradDiv,
        }
    }
}

/// Failure with its exit code.
#[derive(Debug)]
struct Fail {
    code: u8,
    message: String,
}

impl Fail {
    fn usage(message: impl Into<String>) -> Self {
        Fail {
            code: 2,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> Self {
        Fail {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { .. } | Error::Format { .. } | Error::Json(_) => 3,
            Error::NotSolvable(_) => 1,
            _ => 2,
        };
        Fail {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Fail>;

/// Flags merged over the optional config file.
struct RunConfig {
    radius: f64,
    n_modes: Option<usize>,
    lambda_max: Option<f64>,
    quad: Option<(usize, usize, usize)>,
    eps_spec: Option<f64>,
    seed: u64,
    out: Option<PathBuf>,
}

fn read_config(path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text =
        fs::read_to_string(path).map_err(|e| Fail::io(format!("{}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Fail::usage(format!(
                "{}:{}: expected key = value",
                path.display(),
                i + 1
            ))
        })?;
        let key = k.trim().replace('_', "-");
        if ![
            "radius",
            "n-modes",
            "lambda-max",
            "quad",
            "eps-spec",
            "seed",
            "out",
        ]
        .contains(&key.as_str())
        {
            return Err(Fail::usage(format!(
                "{}:{}: unknown key {key:?}",
                path.display(),
                i + 1
            )));
        }
        map.insert(key, v.trim().trim_matches('"').to_string());
    }
    Ok(map)
}

fn parse_num<T: std::str::FromStr>(what: &str, s: &str) -> CliResult<T> {
    s.trim()
        .parse()
        .map_err(|_| Fail::usage(format!("{what}: cannot parse {s:?}")))
}

fn parse_dims(s: &str) -> CliResult<(usize, usize, usize)> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    if parts.len() != 3 {
        return Err(Fail::usage(format!("expected NrxNtxNp, got {s:?}")));
    }
    Ok((
        parse_num("dims", parts[0])?,
        parse_num("dims", parts[1])?,
        parse_num("dims", parts[2])?,
    ))
}

fn parse_triple(what: &str, s: &str) -> CliResult<[f64; 3]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(Fail::usage(format!(
            "{what}: expected three comma-separated numbers, got {s:?}"
        )));
    }
    Ok([
        parse_num(what, parts[0])?,
        parse_num(what, parts[1])?,
        parse_num(what, parts[2])?,
    ])
}

impl RunConfig {
    fn resolve(c: &Common, seed: Option<u64>) -> CliResult<Self> {
        let file = match &c.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        let get = |k: &str| file.get(k).map(String::as_str);
        let radius = match c.radius {
            Some(r) => r,
            None => get("radius")
                .map(|s| parse_num("radius", s))
                .transpose()?
                .unwrap_or(1.0),
        };
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Fail::usage(format!(
                "radius must be positive, got {radius}"
            )));
        }
        let n_modes = match c.n_modes {
            Some(n) => Some(n),
            None => get("n-modes")
                .map(|s| parse_num("n-modes", s))
                .transpose()?,
        };
        if n_modes == Some(0) {
            return Err(Fail::usage("n-modes must be at least 1"));
        }
        let lambda_max = match c.lambda_max {
            Some(l) => Some(l),
            None => get("lambda-max")
                .map(|s| parse_num("lambda-max", s))
                .transpose()?,
        };
        let quad = match c.quad.as_deref().or(get("quad")) {
            Some(s) => Some(parse_dims(s)?),
            None => None,
        };
        let eps_spec = match c.eps_spec {
            Some(e) => Some(e),
            None => get("eps-spec")
                .map(|s| parse_num("eps-spec", s))
                .transpose()?,
        };
        let seed = match seed {
            Some(s) => s,
            None => get("seed")
                .map(|s| parse_num("seed", s))
                .transpose()?
                .unwrap_or(1),
        };
        let out =
            c.out.clone().or_else(|| get("out").map(PathBuf::from)).map(
                |p| match std::env::var_os(OUT_DIR_ENV) {
                    Some(dir) if p.is_relative() => Path::new(&dir).join(p),
                    _ => p,
                },
            );
        Ok(RunConfig {
            radius,
            n_modes,
            lambda_max,
            quad,
            eps_spec,
            seed,
            out,
        })
    }

    fn cutoff(&self) -> Cutoff {
        match (self.lambda_max, self.n_modes) {
            (Some(l), _) => Cutoff::MaxWavenumber(l),
            (None, Some(n)) => Cutoff::First(n),
            (None, None) => Cutoff::First(30),
        }
    }

    /// Writes to --out, or stdout when it is absent.
    fn emit(&self, bytes: &[u8]) -> CliResult<()> {
        match &self.out {
            Some(p) => write_file(p, bytes),
            None => std::io::stdout()
                .write_all(bytes)
                .map_err(|e| Fail::io(format!("stdout: {e}"))),
        }
    }
}

fn write_file(p: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Fail::io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(p, bytes).map_err(|e| Fail::io(format!("{}: {e}", p.display())))
}

fn json_bytes<T: serde::Serialize>(v: &T) -> CliResult<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Fail::from(Error::from(e)))?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn parse_mode(s: &str) -> CliResult<ModeIndex> {
    s.parse().map_err(|e: Error| Fail::usage(e.to_string()))
}

fn cmd_roots(
    cfg: &RunConfig,
    kind: Kind,
    n_max: usize,
    m_max: usize,
    n_min: Option<usize>,
    json: Option<PathBuf>,
) -> CliResult<()> {
    let n_min = n_min.unwrap_or(n_max);
    if n_min > n_max || m_max == 0 {
        return Err(Fail::usage(format!(
            "empty range: n {n_min}..={n_max}, m 1..={m_max}"
        )));
    }
    let kind = match kind {
        Kind::Psi => RootKind::Psi,
        Kind::PsiPrime => RootKind::PsiPrime,
    };
    let table = RootTable::build(kind, n_min, n_max, m_max, cfg.radius)?;
    let mut text = String::new();
    for e in &table.entries {
        // one degree prints bare zeros, several degrees prefix n and m
        if n_min == n_max {
            text.push_str(&format!("{:.15}\n", e.z));
        } else {
            text.push_str(&format!("{} {} {:.15}\n", e.n, e.m, e.z));
        }
    }
    cfg.emit(text.as_bytes())?;
    if let Some(p) = json {
        write_file(&p, (table.to_json()? + "\n").as_bytes())?;
    }
    Ok(())
}

fn cmd_eval(
    cfg: &RunConfig,
    mode: &str,
    point: Option<String>,
    grid: Option<String>,
) -> CliResult<()> {
    let mode = Mode::new(parse_mode(mode)?, cfg.radius)?;
    match (point, grid) {
        (Some(p), None) => {
            let [r, theta, phi] = parse_triple("point", &p)?;
            let at = SphericalPoint::new(r, theta, phi);
            let u = mode.eval(&at)?;
            let report = json!({
                "mode": mode.index.to_string(),
                "eigenvalue": mode.eigenvalue,
                "normalization": mode.normalization,
                "point": [r, theta, phi],
                "u_spherical": [u.r, u.theta, u.phi],
                "u_cartesian": u.to_cartesian(&at),
            });
            cfg.emit(&json_bytes(&report)?)
        }
        (None, Some(g)) => {
            let (a, b, c) = parse_dims(&g)?;
            let gf = sample(&mode, GridDims::new(a, b, c)?, cfg.radius)?;
            let format = cfg
                .out
                .as_deref()
                .map_or(FileFormat::Csv, FileFormat::from_path);
            let mut buf = Vec::new();
            gf.write_to(format, &mut buf)?;
            cfg.emit(&buf)
        }
        _ => Err(Fail::usage("eval needs exactly one of --point or --grid")),
    }
}

fn cmd_project(cfg: &RunConfig, input: &Path, families: &[FamilyArg]) -> CliResult<()> {
    // the grid carries its own radius; --radius is not consulted here
    let gf = import_grid(input, FileFormat::from_path(input))?;
    let fams: Vec<Family> = if families.is_empty() {
        Family::ALL.to_vec()
    } else {
        families.iter().map(|&f| f.into()).collect()
    };
    let modes = enumerate(&fams, cfg.cutoff(), gf.radius)?;
    let q = match cfg.quad {
        Some((a, b, c)) => build_quadrature(a, b, c, gf.radius)?,
        None => default_quadrature(&modes, gf.radius)?,
    };
    let sf = project(&gf, &modes, &q)?;
    cfg.emit((sf.to_json()? + "\n").as_bytes())
}

fn cmd_solve(cfg: &RunConfig, problem: u8, lambda: f64, rhs: &Path, check: bool) -> CliResult<()> {
    let f = SpectralField::load(rhs)?;
    let p =
        Problem::from_id(problem).ok_or_else(|| Fail::usage(format!("no problem {problem}")))?;
    let solved = match p {
        Problem::One => solve_problem1(&f, lambda, cfg.eps_spec),
        Problem::Two => solve_problem2(&f, lambda, cfg.eps_spec),
        Problem::Three => solve_problem3(&f, lambda, cfg.eps_spec),
    };
    match solved {
        Ok(report) => {
            let mut v = serde_json::to_value(&report).map_err(|e| Fail::from(Error::from(e)))?;
            if check {
                let chk = residual_check(&report.solution, &f, lambda, p, 50, cfg.seed)?;
                v["residual_check"] =
                    serde_json::to_value(chk).map_err(|e| Fail::from(Error::from(e)))?;
            }
            cfg.emit(&json_bytes(&v)?)
        }
        Err(Error::NotSolvable(report)) => {
            cfg.emit(&json_bytes(&report)?)?;
            Err(Fail {
                code: 1,
                message: format!(
                    "not solvable: right side has components on resonant modes {}",
                    report
                        .violated_conditions
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_verify(cfg: &RunConfig, suite: &str) -> CliResult<()> {
    let vc = VerifyConfig {
        radius: cfg.radius,
        n_modes: cfg.n_modes.unwrap_or(30),
        quad: cfg.quad,
        seed: cfg.seed,
    };
    let report = verify::run(suite, &vc).map_err(|e| match e {
        Error::InvalidMode(m) => Fail::usage(m),
        other => other.into(),
    })?;
    cfg.emit(&json_bytes(&report)?)?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .suites
            .iter()
            .filter(|s| !s.passed)
            .map(|s| s.suite.as_str())
            .collect();
        Err(Fail {
            code: 1,
            message: format!("verification failed: {}", failed.join(", ")),
        })
    }
}

fn cmd_streamlines(
    cfg: &RunConfig,
    mode: &str,
    seed: &str,
    step: f64,
    max_steps: usize,
    format: Format,
) -> CliResult<()> {
    let mode = Mode::new(parse_mode(mode)?, cfg.radius)?;
    let seed = parse_triple("seed", seed)?.map(|c| c * cfg.radius);
    let sl = trace_streamline(&mode, cfg.radius, seed, step * cfg.radius, max_steps)?;
    let fmt = match (&cfg.out, format) {
        (Some(p), _) => FileFormat::from_path(p),
        (None, Format::Csv) => FileFormat::Csv,
        (None, Format::Vtk) => FileFormat::Vtk,
    };
    let mut buf = Vec::new();
    sl.write_to(fmt, &mut buf)?;
    cfg.emit(&buf)?;
    let last = sl.points.last().copied().unwrap_or(seed);
    eprintln!(
        "{} points, termination {:?}, last point ({:.6}, {:.6}, {:.6})",
        sl.points.len(),
        sl.termination,
        last[0],
        last[1],
        last[2]
    );
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let seed_flag = match &cli.cmd {
        Cmd::Solve { seed, .. } | Cmd::Verify { seed, .. } => *seed,
        _ => None,
    };
    let cfg = RunConfig::resolve(&cli.common, seed_flag)?;
    match cli.cmd {
        Cmd::Roots {
            kind,
            n_max,
            m_max,
            n_min,
            json,
        } => cmd_roots(&cfg, kind, n_max, m_max, n_min, json),
        Cmd::Eval { mode, point, grid } => cmd_eval(&cfg, &mode, point, grid),
        Cmd::Project { input, families } => cmd_project(&cfg, &input, &families),
        Cmd::Solve {
            problem,
            lambda,
            rhs,
            check,
            ..
        } => cmd_solve(&cfg, problem, lambda, &rhs, check),
        Cmd::Verify { suite, .. } => cmd_verify(&cfg, &suite),
        Cmd::Streamlines {
            mode,
            seed,
            step,
            max_steps,
            format,
        } => cmd_streamlines(&cfg, &mode, &seed, step, max_steps, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ballspec: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
