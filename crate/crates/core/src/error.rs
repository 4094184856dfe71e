use std::path::PathBuf;

use thiserror::Error;

use crate::modes::ModeIndex;
use crate::roots::RootKind;
use crate::solve::SolveReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree {0} outside the supported range 0..=64")]
    DegreeOutOfRange(usize),

    #[error("argument {0} must be finite and positive")]
    BadArgument(f64),

    #[error("phi is singular at t = 0 for n = 0; use n >= 1")]
    SingularDegree,

    #[error("phi needs a nonzero eigenvalue")]
    ZeroLambda,

    #[error("order |k| = {k} exceeds degree n = {n}")]
    OrderExceedsDegree { n: usize, k: i32 },

    #[error("theta = {0} is too close to a pole for the finite-difference step")]
    PoleTooClose(f64),

    #[error("root ({n}, {m}) outside the supported range n <= 64, m <= 256")]
    RootOutOfRange { n: usize, m: usize },

    #[error("no sign change bracketing {kind:?} zero ({n}, {m}) on scan interval [{lo}, {hi}]")]
    Bracketing {
        kind: RootKind,
        n: usize,
        m: usize,
        lo: f64,
        hi: f64,
    },

    #[error("invalid mode index: {0}")]
    InvalidMode(String),

    #[error("invalid cutoff: {0}")]
    InvalidCutoff(String),

    #[error("operation expects {expected} mode, got {got}")]
    WrongFamily {
        expected: &'static str,
        got: ModeIndex,
    },

    #[error("point (r = {r}, theta = {theta}) outside the ball of radius {radius}")]
    OutsideBall { r: f64, theta: f64, radius: f64 },

    #[error("radius must be finite and positive, got {0}")]
    BadRadius(f64),

    #[error("invalid quadrature orders: {0}")]
    InvalidOrders(String),

    #[error("field evaluation failed at (r = {r}, theta = {theta}, phi = {phi}): {message}")]
    Evaluator {
        r: f64,
        theta: f64,
        phi: f64,
        message: String,
    },

    #[error("fields live on balls of different radius ({0} vs {1})")]
    RadiusMismatch(f64, f64),

    #[error("operator power 0 requested")]
    ZeroPower,

    #[error("invalid scale order: {0}")]
    InvalidScaleOrder(String),

    #[error("lambda = 0 with a nonzero {0} part has no solution")]
    ZeroLambdaWithPart(&'static str),

    #[error("right side violates {} solvability condition(s)", .0.violated_conditions.len())]
    NotSolvable(Box<SolveReport>),

    #[error("streamline seed {0:?} outside the ball")]
    SeedOutsideBall([f64; 3]),

    #[error("step must be positive, got {0}")]
    BadStep(f64),

    #[error("malformed {format} input: {message}")]
    Format {
        format: &'static str,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(format: &'static str, message: impl Into<String>) -> Self {
        Error::Format {
            format,
            message: message.into(),
        }
    }
}
