//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An operation received `n = 0`; a single-coefficient ancilla has no
    /// teleportation slot.
    #[error("ancilla size n must be at least 1 (got {0})")]
    InvalidSize(usize),

    /// Tridiagonal dimensions are inconsistent.
    #[error("off-diagonal length {offdiag} must be one less than diagonal length {diag}")]
    DimensionMismatch { diag: usize, offdiag: usize },

    /// The angle-condition scan found no sign change inside the bracket.
    #[error(
        "no sign change of the angle condition in ({lo}, {hi}) for n = {n} \
         after {refinements} scan refinements"
    )]
    NoBracket {
        n: usize,
        lo: f64,
        hi: f64,
        refinements: usize,
    },

    /// The angle solver converged to an interval but the residual stayed
    /// above the requested tolerance.
    #[error("angle solver residual {residual:e} exceeds tolerance {tol:e} at n = {n}")]
    ResidualTooLarge { n: usize, residual: f64, tol: f64 },

    /// Inverse iteration did not reach the requested eigenvector residual.
    #[error("eigenvector iteration limit reached; best residual {best_residual:e} > {tol:e}")]
    EigenIterationLimit { best_residual: f64, tol: f64 },

    /// A closed-form coefficient vector disagreed with the eigensolver oracle.
    #[error(
        "closed-form coefficients disagree with eigensolver oracle at n = {n}: \
         max componentwise deviation {deviation:e} > {tol:e}"
    )]
    OracleMismatch { n: usize, deviation: f64, tol: f64 },

    /// Qubit amplitudes are not normalized.
    #[error("qubit amplitudes have |alpha|^2 + |beta|^2 = {norm}, expected 1")]
    NotNormalized { norm: f64 },

    /// Coefficient vector rejected by a constructor.
    #[error("invalid coefficient vector: {0}")]
    InvalidCoefficients(String),

    /// Measurement outcome index is outside `0..=n+1`.
    #[error("outcome index {k} out of range 0..={max}")]
    OutcomeOutOfRange { k: usize, max: usize },

    /// Conditioning on an outcome that never occurs.
    #[error("outcome k = {k} has zero probability")]
    ZeroProbabilityOutcome { k: usize },

    /// Mode index list passed to a Fock-space operation is invalid.
    #[error("invalid mode list: {0}")]
    InvalidModes(String),

    /// Fock-space verification found a state that violates the protocol
    /// contract.
    #[error("teleportation verification failed: {0}")]
    TeleportationMismatch(String),

    /// Preparation-circuit target cannot be realized with transmissions <= 1.
    #[error("preparation target rejected: {0}")]
    UnrealizableTarget(String),

    /// Simulated and closed-form herald probabilities disagree.
    #[error(
        "heralded preparation mismatch: simulated {simulated:.17e} vs closed form \
         {closed_form:.17e} (|diff| = {diff:e})"
    )]
    PrepProbabilityMismatch {
        simulated: f64,
        closed_form: f64,
        diff: f64,
    },

    /// Heralded output state disagreed with the target or with the
    /// amplitude-level model.
    #[error("heralded preparation check failed: {0}")]
    PrepMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
