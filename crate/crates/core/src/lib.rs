//! Spectral toolkit for the curl and grad-div operators on a ball.
//!
//! Both operators are diagonal in explicit eigenbases built from spherical
//! Bessel functions and real spherical harmonics. The crate computes the
//! spectra, evaluates and normalizes the eigenfields, projects arbitrary
//! fields onto them and then works in coefficient space: operator powers,
//! Sobolev-scale norms, resolvents with the Fredholm alternative.
//!
//! ```
//! use ballspec::{enumerate, Cutoff, Family};
//!
//! let modes = enumerate(&[Family::CurlPlus], Cutoff::First(3), 1.0).unwrap();
//! assert!((modes[0].eigenvalue - 4.4934).abs() < 1e-4);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod diffops;
pub mod error;
pub mod fieldio;
pub mod geom;
pub mod modes;
pub mod quad;
pub mod roots;
pub mod solve;
pub mod specfun;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use geom::{FieldEvaluator, FnField, SphVec, SphericalPoint, ZeroField};
pub use modes::{enumerate, Cutoff, Family, Mode, ModeIndex};
pub use quad::{
    build_quadrature, inner_product, project, synthesize, BallQuadrature, SpectralField,
};
pub use roots::{alpha, rho, RootKind, RootTable};
pub use solve::{
    resolvent_curl, resolvent_graddiv, solve_problem1, solve_problem2, solve_problem3, Problem,
    SolveReport,
};
pub use spectral::{
    apply_power, class_report, scale_norm, solve_poly, ClassC, Operator, ScaleOrder,
};
