use thiserror::Error;

/// Errors produced by evaluation, resampling, generation, and file parsing.
#[derive(Debug, Error)]
pub enum Error {
    /// The reference contains no duration for one of the two classes, so
    /// error rates against that class are undefined.
    #[error("reference contains no {missing} duration; both classes are required")]
    EmptyClass { missing: &'static str },

    #[error("labels ({labels}) and scores ({scores}) differ in length")]
    LengthMismatch { labels: usize, scores: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("quantile {0} is outside [0, 100]")]
    QuantileDomain(f64),

    #[error("resolutions {from} s -> {to} s are not an integer multiple of each other")]
    NonIntegerRatio { from: f64, to: f64 },

    #[error("score track has resolution {track} s, expected {expected} s")]
    ResolutionMismatch { track: f64, expected: f64 },

    #[error("trial {trial_id} is invalid: {violation}")]
    InvalidTrial { trial_id: String, violation: String },

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    /// A trial id appears in one input file but not the other.
    #[error("trial {trial_id} is {detail}")]
    TrialMismatch { trial_id: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
