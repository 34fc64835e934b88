//! Explicit spectral representations of the sinc-kernel Wiener-Hopf operator
//! and related operators, with quadrature-based verification.
//!
//! The library is organised bottom-up: special functions and quadrature rules,
//! then the operators (Wiener-Hopf, finite Hilbert, Toeplitz, Hankel blocks),
//! then symbol covariance and the report/CLI layer.

pub mod covariance;
pub mod finite_hilbert;
pub mod hankel_reduction;
pub mod quadrature;
pub mod report;
pub mod specfun;
pub mod spectral_transform;
pub mod toeplitz_arc;
pub mod wiener_hopf;

pub use num_complex::Complex64;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("tail bound violated: {0}")]
    Tail(String),
    #[error("{0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

/// A computed value together with an upper bound on the error from truncating
/// an infinite integration range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounded<T> {
    pub value: T,
    pub tail_bound: f64,
}
