use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has non-finite entries or zero extent")]
    InvalidMatrix,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian: ||A - A*|| = {residual:.3e} exceeds {tol:.1e}")]
    NonHermitian { residual: f64, tol: f64 },

    #[error("eigensolver failed to converge")]
    ConvergenceFailure,

    #[error("Schatten order must satisfy p >= 1, got {0}")]
    InvalidOrder(f64),

    #[error(
        "not a projection: ||P - P*|| = {hermiticity:.3e}, ||P^2 - P|| = {idempotency:.3e}, tolerance {tol:.1e}"
    )]
    NotProjection {
        hermiticity: f64,
        idempotency: f64,
        tol: f64,
    },

    #[error("eigenvalue {eigenvalue:.12} of P - Q sits in the ambiguous band next to +-1 (tolerance {tol:.1e})")]
    AmbiguousSpectrum { eigenvalue: f64, tol: f64 },

    #[error("generic part of P1 - P2 has norm {norm:.12}, too close to 1 to rotate (tolerance {tol:.1e})")]
    DegenerateGeometry { norm: f64, tol: f64 },

    #[error("{requested} modes exceed the configured cap of {cap}")]
    TooManyModes { requested: usize, cap: usize },

    #[error("unknown mode label {0}")]
    UnknownLabel(String),

    #[error("operator is not unitary: residual {residual:.3e}")]
    NotUnitary { residual: f64 },

    #[error("state is not invariant under the charge: residual {residual:.3e}")]
    NotInvariant { residual: f64 },

    #[error("vectors are not orthonormal: Gram residual {residual:.3e}")]
    NotOrthonormal { residual: f64 },

    #[error("hopping |H| = {amplitude:.3e} at distance {distance:.3} exceeds decay bound {bound:.3e}")]
    DecayViolation {
        distance: f64,
        amplitude: f64,
        bound: f64,
    },

    #[error("origin must lie in the interior of the patch")]
    OriginOnBoundary,

    #[error("Fermi level {mu} is within {tol:.1e} of eigenvalue {eigenvalue}")]
    FermiLevelInSpectrum { eigenvalue: f64, mu: f64, tol: f64 },

    #[error("could not resolve eigenvalue branch {branch} near phi = {phi:.9}")]
    UnresolvedCrossing { phi: f64, branch: usize },

    #[error("branches {first} and {second} cross the Fermi level in the same cell near phi = {phi:.9}")]
    NonSimpleCrossing { phi: f64, first: usize, second: usize },

    #[error("step floor reached after {steps} steps, last change {delta:.3e}")]
    StepFloorReached { steps: usize, delta: f64 },

    #[error("propagator lost unitarity: residual {residual:.3e}")]
    UnitarityLoss { residual: f64 },

    #[error("model is not commensurate with a periodic closure: {0}")]
    NotCommensurate(String),

    #[error("selected bands are not separated on the Brillouin zone: gap {gap:.3e}")]
    GapClosesOnBZ { gap: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
