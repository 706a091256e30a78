use thiserror::Error;

pub type Result<T> = std::result::Result<T, NemsError>;

/// Every failure the toolkit reports.
///
/// The variants split into two families that the command-line front end maps
/// onto distinct exit codes: input problems (bad files, invalid parameters,
/// infeasible requests) and numerical failures (no minimum, unstable
/// integration, singular systems).
#[derive(Debug, Error)]
pub enum NemsError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("drive normalization violated: sum of |r_phi| is {sum} (strict policy requires 1)")]
    Normalization { sum: f64 },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("infeasible design: {0}")]
    Infeasible(String),

    #[error("flux window violation: {0}")]
    FluxWindow(String),

    #[error("drive amplitude {eps} exceeds the single-well headroom {headroom}")]
    DriveWindow { eps: f64, headroom: f64 },

    #[error("truncation {dim} is below the required {required} levels")]
    Truncation { dim: usize, required: usize },

    #[error("no potential minimum found: {0}")]
    NoMinimum(String),

    #[error("non-positive curvature at the minimum (c2 = {0})")]
    Curvature(f64),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("numerical instability: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl NemsError {
    /// True for errors caused by the numerics rather than by the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            NemsError::NoMinimum(_) | NemsError::Curvature(_) | NemsError::Singular(_) | NemsError::Numerical(_)
        )
    }
}

impl From<serde_json::Error> for NemsError {
    fn from(e: serde_json::Error) -> Self {
        NemsError::Parse(e.to_string())
    }
}
