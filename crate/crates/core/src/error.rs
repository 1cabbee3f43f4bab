use thiserror::Error;

/// Which facility stage a capacity check refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Plant,
    Depot,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Stage::Plant => write!(f, "plant"),
            Stage::Depot => write!(f, "depot"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    /// An individual does not open enough capacity at one stage.
    #[error("capacity shortfall at {stage} stage: opened {opened}, demand {demand}")]
    CapacityShortfall {
        stage: Stage,
        opened: i64,
        demand: i64,
    },

    /// The flow network cannot carry the full demand.
    #[error("infeasible network: delivered {delivered} of {required} demand units")]
    FlowInfeasible { delivered: i64, required: i64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Prediction requested from a model that was never trained.
    #[error("surrogate model is untrained")]
    Untrained,

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
