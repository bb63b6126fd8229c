use cbi_core::CbiError;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CbiError),
    #[error("invalid {field}: {constraint}")]
    Scenario { field: String, constraint: String },
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn scenario(field: &str, constraint: impl Into<String>) -> Self {
        CliError::Scenario {
            field: field.to_string(),
            constraint: constraint.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Scenario { .. } => "invalid_parameter",
            CliError::Parse(_) => "parse",
            CliError::Io(_) => "io",
            CliError::Usage(_) => "usage",
        }
    }

    /// 2 for bad input, 1 when valid input has no answer.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(CbiError::InvalidParameter { .. }) => 2,
            CliError::Core(_) => 1,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        let extra = match self {
            CliError::Core(CbiError::InvalidParameter { field, constraint }) => {
                json!({ "field": field, "constraint": constraint })
            }
            CliError::Scenario { field, constraint } => {
                json!({ "field": field, "constraint": constraint })
            }
            CliError::Core(CbiError::InfeasibleClaim { bound, epsilon }) => {
                json!({ "bound": bound, "epsilon": epsilon })
            }
            CliError::Core(CbiError::Vacuous {
                phi,
                one_minus_theta,
            }) => {
                json!({ "phi": phi, "one_minus_theta": one_minus_theta })
            }
            _ => json!({}),
        };
        if let (Some(b), Value::Object(e)) = (body.as_object_mut(), extra) {
            b.extend(e);
        }
        json!({ "error": body })
    }
}
