use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("pulse area must be positive and finite, got {0}")]
    NonPositiveArea(f64),

    #[error("pulse phase must be finite, got {0}")]
    NonFinitePhase(f64),

    #[error("profile value at the centre is {center:.6}, below the threshold {threshold}")]
    CenterBelowThreshold { center: f64, threshold: f64 },

    #[error("profile never reaches {level} on the positive error side")]
    LevelNotReached { level: f64 },

    #[error("profile never reaches the threshold {threshold}")]
    ThresholdNeverReached { threshold: f64 },

    #[error("alpha must lie in (0, 0.5), got {0}")]
    InvalidAlpha(f64),

    #[error("profile needs an odd number of points, at least 3; got {0}")]
    InvalidPointCount(usize),

    #[error("{family} does not admit {n_pulses} pulses: {reason}")]
    InvalidArity {
        family: String,
        n_pulses: usize,
        reason: &'static str,
    },

    #[error("{objective} is not the objective of the {family} family")]
    ObjectiveMismatch { family: String, objective: String },

    #[error("at least one restart is required")]
    NoRestarts,

    #[error("objective evaluated to a non-finite value")]
    NonFiniteObjective,

    #[error("sequence does not follow the {family} structure: {reason}")]
    Structure { family: String, reason: String },

    #[error("unknown sequence label `{0}`")]
    UnknownLabel(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("sequence file: {0}")]
    Format(String),
}
