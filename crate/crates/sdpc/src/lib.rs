//! Capacity region of the two-user Gaussian MIMO broadcast channel with a
//! common message and two confidential messages.
//!
//! The crate evaluates closed-form rate expressions for secret dirty-paper
//! coding, maximizes weighted rate objectives over positive-semidefinite
//! covariance pairs, fits KKT certificates at candidate optima, constructs
//! and verifies enhanced channels, reduces general channels to the aligned
//! sub-class, and cross-checks everything against brute-force grid oracles.
//!
//! All rates are in nats. Matrices are real and symmetric throughout; the
//! [`linalg`] module is the single numeric kernel every other module uses.

pub mod channel;
pub mod enhance;
pub mod kkt;
pub mod linalg;
pub mod oracle;
pub mod random;
pub mod rates;
pub mod solver;

use linalg::SymMatrix;

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A matrix that must be invertible has an eigenvalue at or below the
    /// singularity threshold.
    #[error("singular matrix: eigenvalue {min_eig:.3e} at or below threshold {threshold:.3e}")]
    SingularMatrix { min_eig: f64, threshold: f64 },

    /// Two operands have incompatible dimensions.
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    /// A matrix entry is NaN or infinite.
    #[error("non-finite matrix entry")]
    NonFinite,

    /// Asymmetry beyond the ingest tolerance; small asymmetry is averaged
    /// away, large asymmetry means the caller built the wrong matrix.
    #[error("asymmetric matrix: max |a_ij - a_ji| = {asymmetry:.3e} exceeds {tol:.3e}")]
    Asymmetric { asymmetry: f64, tol: f64 },

    /// Eigenvalue below the PSD clipping tolerance.
    #[error("not positive semidefinite: min eigenvalue {min_eig:.3e} below -{tol:.3e}")]
    NotPsd { min_eig: f64, tol: f64 },

    /// Alternating projection stopped at an infeasible iterate; carries it.
    #[error("projection did not converge after {cycles} cycles (last change {residual:.3e})")]
    NoConvergence {
        cycles: usize,
        residual: f64,
        last: Box<(SymMatrix, SymMatrix)>,
    },

    /// A gain matrix is not square where the operation requires it.
    #[error("gain matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// A perturbed gain matrix has a singular value below tolerance.
    #[error("gain matrix numerically singular: singular value {value:.3e}")]
    SingularGain { value: f64 },

    /// Covariance pair violates the feasibility constraints of the channel.
    #[error("infeasible covariance pair: {reason}")]
    InfeasiblePair { reason: &'static str },

    /// Trace of the covariances exceeds the power budget.
    #[error("power constraint violated: trace {trace:.6} exceeds budget {budget:.6}")]
    PowerExceeded { trace: f64, budget: f64 },

    /// Auxiliary-scheme covariances do not reproduce the claimed pair.
    #[error("auxiliary scheme inconsistent with its covariance pair (deviation {deviation:.3e})")]
    InconsistentScheme { deviation: f64 },

    /// Every solver restart failed its first line search.
    #[error("no progress: every restart failed the first line search")]
    NoProgress,

    /// Weight configuration leaves the requested quantity undefined.
    #[error("degenerate weights: {reason}")]
    DegenerateWeights { reason: &'static str },

    /// All weights are zero.
    #[error("all weights are zero")]
    ZeroWeights,

    /// Operation requires a scalar (1x1) channel.
    #[error("channel is not scalar: t = {t}")]
    NotScalar { t: usize },

    /// Operation requires diagonal matrices.
    #[error("matrix is not diagonal (max off-diagonal {max_offdiag:.3e})")]
    NotDiagonal { max_offdiag: f64 },

    /// Auxiliary conditional covariance violates its cap.
    #[error("auxiliary covariance exceeds the input covariance cap")]
    InvalidAux,

    /// Channel-spec document failed to parse.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
