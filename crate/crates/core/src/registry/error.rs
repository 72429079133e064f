use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorCode {
    InvalidKey,
    ComponentDisabled,
    UnknownTool,
    ParameterViolation,
    HandlerFailure,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::InvalidKey => "InvalidKey",
            ErrorCode::ComponentDisabled => "ComponentDisabled",
            ErrorCode::UnknownTool => "UnknownTool",
            ErrorCode::ParameterViolation => "ParameterViolation",
            ErrorCode::HandlerFailure => "HandlerFailure",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a violated constraint came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintSource {
    Static,
    Runtime,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorDetail {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub got: Option<Value>,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<ConstraintSource>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, thiserror::Error)]
#[error("{code}: {}", detail.message)]
pub struct StructuredError {
    pub code: ErrorCode,
    pub detail: ErrorDetail,
}

impl StructuredError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        StructuredError {
            code,
            detail: ErrorDetail {
                message: message.into(),
                ..ErrorDetail::default()
            },
        }
    }

    pub fn invalid_key(key: &str) -> Self {
        Self::new(ErrorCode::InvalidKey, format!("no component registered under `{key}`"))
    }

    pub fn violation(
        param: &str,
        expected: impl Into<String>,
        got: Option<&Value>,
        source: ConstraintSource,
        message: impl Into<String>,
    ) -> Self {
        StructuredError {
            code: ErrorCode::ParameterViolation,
            detail: ErrorDetail {
                param: Some(param.to_string()),
                expected: Some(expected.into()),
                got: got.cloned(),
                message: message.into(),
                source: Some(source),
            },
        }
    }
}

/// Lifecycle errors for mount/unmount.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("key `{0}` is already in use on this page")]
    DuplicateKey(String),
    #[error("no component registered under `{0}`")]
    InvalidKey(String),
}
