use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lambda must be in [0, 1), got {0}")]
    InvalidLambda(f64),

    #[error("discarded tail mass exceeds tolerance; need j_max >= {required_j_max}")]
    TailTooHeavy { required_j_max: u32 },

    #[error("state is not in Schmidt pairing form")]
    NotSchmidtForm,

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("dense dimension {dim} exceeds limit {limit}")]
    DimensionTooLarge { dim: usize, limit: usize },

    #[error("gain ratio undefined at zero squeezing")]
    ZeroSqueezing,

    #[error("term with total {found} outside sector {expected}")]
    WrongSector { expected: u32, found: u32 },

    #[error("projection onto the requested sector is empty")]
    EmptyProjection,

    #[error("cutoff {cutoff} is below the requested sector {j}")]
    CutoffTooSmall { cutoff: u32, j: u32 },

    #[error("first-order validity guard tripped: eta*tau = {value} > {guard}")]
    NoiseTooLarge { value: f64, guard: f64 },

    #[error("QND window is empty: t_min = {t_min:e} s >= t_max = {t_max:e} s")]
    WindowEmpty { t_min: f64, t_max: f64 },

    #[error("invalid integration step: {0}")]
    InvalidStep(String),

    #[error("integration diverged: |b| = {amplitude} exceeds sentinel {limit} at t = {time:e}")]
    UnstableStep {
        amplitude: f64,
        limit: f64,
        time: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Short stable identifier, used by the CLI when a numeric guard trips.
    pub fn guard_name(&self) -> &'static str {
        match self {
            Error::InvalidLambda(_) => "InvalidLambda",
            Error::TailTooHeavy { .. } => "TailTooHeavy",
            Error::NotSchmidtForm => "NotSchmidtForm",
            Error::NotNormalized(_) => "NotNormalized",
            Error::DimensionTooLarge { .. } => "DimensionTooLarge",
            Error::ZeroSqueezing => "ZeroSqueezing",
            Error::WrongSector { .. } => "WrongSectorError",
            Error::EmptyProjection => "EmptyProjection",
            Error::CutoffTooSmall { .. } => "CutoffTooSmall",
            Error::NoiseTooLarge { .. } => "NoiseTooLarge",
            Error::WindowEmpty { .. } => "WindowEmpty",
            Error::InvalidStep(_) => "InvalidStep",
            Error::UnstableStep { .. } => "UnstableStep",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}
