use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("level {level} outside table range 1..={n_max}")]
    LevelOutOfRange { level: usize, n_max: usize },

    #[error("no convergence: {0}")]
    Convergence(String),

    /// The evolution grid was too small to hold the propagated packet.
    #[error(
        "grid truncation: boundary probability {boundary_probability:.3e} exceeds {limit:.1e}"
    )]
    Truncation {
        boundary_probability: f64,
        limit: f64,
    },

    #[error("invalid surface profile: {0}")]
    Profile(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{channel} channel failed: {source}")]
    Channel {
        channel: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::LevelOutOfRange { .. } => 2,
            Error::Convergence(_) | Error::Truncation { .. } => 3,
            Error::Channel { source, .. } => source.exit_code(),
            Error::Profile(_) | Error::Json(_) => 2,
            Error::Io(_) => 1,
        }
    }

    /// Short machine-parseable tag for the failure class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::LevelOutOfRange { .. } => "range",
            Error::Convergence(_) => "convergence",
            Error::Truncation { .. } => "truncation",
            Error::Profile(_) => "profile",
            Error::Config(_) => "config",
            Error::Channel { source, .. } => source.kind(),
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
