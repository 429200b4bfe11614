use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error(
        "ambiguous rank: cutoff {cutoff:.3e} separates singular values {kept:.3e} and {dropped:.3e}, \
         which lie within a factor 10 of it"
    )]
    DegenerateTolerance { cutoff: f64, kept: f64, dropped: f64 },

    #[error("pencil is not regular: smallest singular value of B is {sigma_min_b:.3e}")]
    NotRegular { sigma_min_b: f64 },

    #[error("z = {z} is numerically in the spectrum of the pencil")]
    SpectrumHit { z: Complex64 },

    #[error("initial value is not consistent (distance {distance:.3e} to IV); projection onto IV: {}", format_vector(projection))]
    InconsistentInitialValue { distance: f64, projection: Vec<Complex64> },

    #[error("matrix exponential overflowed")]
    Overflow,

    #[error("invalid rank {rank} for dimension {n}")]
    BadRank { n: usize, rank: usize },

    #[error("spectrum hint has {got} entries, expected rank = {expected}")]
    BadSpectrumHint { expected: usize, got: usize },

    #[error("spectrum within {margin:.3e} of the imaginary axis (tolerance {tol:.3e})")]
    SpectrumTooCloseToAxis { margin: f64, tol: f64 },

    #[error("pencil admits no exponential dichotomy (verdict: {0})")]
    NoDichotomy(String),

    #[error("rho = {rho} must exceed max(s0, 0) = {bound}")]
    RhoTooSmall { rho: f64, bound: f64 },

    #[error("quadrature did not converge: {0}")]
    NonConvergent(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn format_vector(v: &[Complex64]) -> String {
    let parts: Vec<String> = v.iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
    format!("[{}]", parts.join(", "))
}
