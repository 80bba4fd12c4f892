//! Numerical laboratory for inner-product kernels in the polynomial
//! high-dimensional regime: Gegenbauer eigendecompositions, the
//! Marchenko-Pastur limit of Gegenbauer kernel matrices, and exact and
//! asymptotic kernel ridge regression risk.

pub mod asymptotics;
pub mod domains;
pub mod error;
pub mod gauss;
pub mod gegenbauer;
pub mod kernels;
pub mod krr;
pub mod linalg;
pub mod quadrature;
pub mod seed;
pub mod spectrum;

pub use domains::{Dataset, Domain, DomainKind, MarginalMeasure};
pub use error::{Error, Result};
pub use gegenbauer::GegenbauerEvaluator;
pub use kernels::{CoefficientProfile, KernelSpec};

/// Library version recorded in experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
