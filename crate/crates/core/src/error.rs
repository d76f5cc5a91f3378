use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("effective discount gap delta = {delta} must be positive")]
    NonPositiveDelta { delta: f64 },

    #[error("invalid regulator law: {0}")]
    InvalidLaw(String),

    #[error("{what}: y = {y} outside [{lo}, {hi}]")]
    OutOfDomain {
        what: &'static str,
        y: f64,
        lo: f64,
        hi: f64,
    },

    #[error("mixed probability of agent {agent} undefined: zero denominator (limiting regime)")]
    DegenerateProbability { agent: u8 },

    #[error("no agent acts: max(p1, p2) must be positive")]
    NoAction,

    #[error("operation requires {0}")]
    Unsupported(&'static str),

    #[error("exponential saturated: gamma * x = {0} exceeds the representable range")]
    Saturated(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(String),

    #[error("coordination game did not settle within {0} rounds")]
    RoundCap(u64),
}

impl Error {
    /// True for errors that signal an invalid model or law rather than a bad query.
    pub fn is_invalid_model(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::NonPositiveDelta { .. } | Error::InvalidLaw(_)
        )
    }

    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_) | Error::Saturated(_) | Error::RoundCap(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
