//! Number-variance statistics and hyperuniformity classification for the
//! extended Heisenberg family of determinantal point processes on `C^D`.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod asymptotics;
pub mod error;
pub mod kernels;
pub mod montecarlo;
pub mod quadrature;
pub mod specfun;
pub mod sum;
pub mod window;

pub use analysis::{ClassLabel, ClassReport, SweepResult, SweepRoute, SweepRow};
pub use error::{Error, Result};
pub use kernels::{ComplexPoint, KernelSpec};
pub use montecarlo::{McConfig, McEstimate};
pub use window::{BernoulliSpectrum, MomentReport, Route, Window, WindowKind};
