use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configured size cap was hit.
    #[error("cap exceeded: {what} (limit {limit})")]
    CapExceeded { what: String, limit: u128 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid group spec field `{field}`: {reason}")]
    InvalidSpec { field: String, reason: String },

    #[error("elements or sets belong to different groups")]
    GroupMismatch,

    #[error("element is not in canonical form: {0}")]
    NotCanonical(String),

    #[error("element does not belong to the group: {0}")]
    NotInGroup(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A property that must hold was found violated. `witness` is a JSON
    /// counterexample suitable for printing.
    #[error("property violated: {property}")]
    Violation {
        property: String,
        witness: serde_json::Value,
    },

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn cap(what: impl Into<String>, limit: impl TryInto<u128>) -> Self {
        Error::CapExceeded {
            what: what.into(),
            limit: limit.try_into().unwrap_or(u128::MAX),
        }
    }

    pub fn violation(property: impl Into<String>, witness: serde_json::Value) -> Self {
        Error::Violation {
            property: property.into(),
            witness,
        }
    }

    pub fn spec(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidSpec {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Violation { .. } => 1,
            Error::CapExceeded { .. } => 3,
            Error::NonConvergence(_) | Error::Io(_) => 4,
            _ => 2,
        }
    }
}
