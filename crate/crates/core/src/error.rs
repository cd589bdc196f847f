use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not skew-Hermitian (residual {residual:.3e})")]
    NotSkewHermitian { residual: f64 },

    #[error("matrix is not traceless (|trace| = {trace:.3e})")]
    NotTraceless { trace: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Hermitian eigensolver did not converge for a {dim}x{dim} matrix")]
    ConvergenceFailure { dim: usize },

    #[error("invalid block structure: {0}")]
    InvalidBlocks(String),

    #[error("block structure mismatch: {0}")]
    StructureMismatch(String),

    #[error("invalid metric operator: {0}")]
    InvalidMetric(String),

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid density matrix: {0}")]
    NotDensity(String),

    #[error("density matrix is not rank one (second eigenvalue {second:.3e})")]
    NotRankOne { second: f64 },

    #[error("invalid quasi-pure specification: {0}")]
    InvalidSpec(String),

    #[error("quasi-pure spectra differ: ({p1}, {p2}) vs ({q1}, {q2})")]
    SpectraMismatch { p1: f64, p2: f64, q1: f64, q2: f64 },

    #[error("unitary does not map the distinguished state (distance {distance:.3e})")]
    DistinguishedStateNotMapped { distance: f64 },

    #[error("state is stationary under the Hamiltonian (energy uncertainty {delta_e:.3e})")]
    StationaryState { delta_e: f64 },

    #[error("Hamiltonian does not generate optimal-speed evolution from this state (residual {residual:.3e})")]
    NotOptimal { residual: f64 },

    #[error("Fubini-Study distance {distance} reaches the pi/2 fold inside the window")]
    FoldExceeded { distance: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
