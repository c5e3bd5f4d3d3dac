use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis level {level} exceeds the maximum {max} (tensor memory guard)")]
    LevelTooLarge { level: u32, max: u32 },

    #[error("coefficient length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("point {xi} lies outside the open unit interval")]
    PointOutOfDomain { xi: f64 },

    #[error("density {rho} outside the admissible range [0, {rho_max}]")]
    DensityOutOfRange { rho: f64, rho_max: f64 },

    #[error("function undefined at nodal value {value} (dyadic cell {cell})")]
    UndefinedAtNode { cell: usize, value: f64 },

    #[error("negative discriminant in equilibrium weight recursion at rho = {rho}, j = {index}")]
    NegativeDiscriminant { rho: f64, index: usize },

    #[error("invalid physics parameters: {0}")]
    InvalidParams(String),

    #[error("CFL violation: dt = {dt} exceeds the stable step {dt_max}")]
    CflViolation { dt: f64, dt_max: f64 },

    #[error("vacuum state: non-positive nodal density {rho} in cell {cell}")]
    Vacuum { cell: usize, rho: f64 },

    #[error("nodal density {rho} in cell {cell} outside [0, {rho_max}]")]
    StateOutOfRange { cell: usize, rho: f64, rho_max: f64 },

    #[error("initial data rejected: {0}")]
    BadInitialData(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("sample run {index} failed: {source}")]
    SampleFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
