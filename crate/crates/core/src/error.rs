use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not a valid density matrix: {0}")]
    NotDensity(String),

    #[error("state is not positive semidefinite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("Bloch vector norm {0} exceeds 1")]
    BlochNorm(f64),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitCount { n: usize, min: usize, max: usize },

    #[error("correlation term changes the reduced marginals (residual {0:e}); the induced map would not be affine")]
    CorrelationsNotAffine(f64),

    #[error("I - T is singular (|det| = {0:e}); the map has a family of fixed points")]
    FixedPointFamily(f64),

    #[error("singular closed form: {0}")]
    Singular(String),

    #[error("invalid Pauli label `{0}`")]
    PauliLabel(char),

    #[error("unknown claim `{id}`; available: {available}")]
    UnknownClaim { id: String, available: String },

    #[error("control case was not detected for claim `{0}`; report is vacuous")]
    VacuousControl(String),
}
