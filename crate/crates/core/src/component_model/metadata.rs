//! Tool signatures and interaction metadata (the structured contract a tool call must satisfy).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamType {
    String,
    Number,
    Boolean,
    Enum,
    List,
    Date,
}

impl ParamType {
    pub fn as_str(self) -> &'static str {
        match self {
            ParamType::String => "string",
            ParamType::Number => "number",
            ParamType::Boolean => "boolean",
            ParamType::Enum => "enum",
            ParamType::List => "list",
            ParamType::Date => "date",
        }
    }

    pub fn accepts(self, value: &Value) -> bool {
        match self {
            ParamType::String | ParamType::Date => value.is_string(),
            ParamType::Number => value.is_number(),
            ParamType::Boolean => value.is_boolean(),
            ParamType::List => value.is_array(),
            ParamType::Enum => !value.is_null() && !value.is_object(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: ParamType,
    pub required: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolSignature {
    pub name: String,
    pub params: Vec<ParamSpec>,
    pub description: String,
}

impl ToolSignature {
    pub fn new(name: &str, description: &str) -> Self {
        ToolSignature {
            name: name.to_string(),
            params: Vec::new(),
            description: description.to_string(),
        }
    }

    pub fn param(mut self, name: &str, ty: ParamType, required: bool) -> Self {
        self.params.push(ParamSpec {
            name: name.to_string(),
            ty,
            required,
        });
        self
    }
}

/// A numeric or calendar bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Limit {
    Number(f64),
    Date(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamSchema {
    #[serde(rename = "type")]
    pub ty: Option<ParamType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enum_values: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
}

/// Constraints derived from current props; recomputed on every metadata read.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuntimeConstraints {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date_format: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<Limit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<Limit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed_values: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excluded_values: Option<Vec<Value>>,
}

impl RuntimeConstraints {
    pub fn is_empty(&self) -> bool {
        *self == RuntimeConstraints::default()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamContract {
    #[serde(rename = "static")]
    pub schema: ParamSchema,
    #[serde(default, skip_serializing_if = "RuntimeConstraints::is_empty")]
    pub runtime: RuntimeConstraints,
}

impl ParamContract {
    pub fn of(ty: ParamType) -> Self {
        ParamContract {
            schema: ParamSchema {
                ty: Some(ty),
                ..ParamSchema::default()
            },
            runtime: RuntimeConstraints::default(),
        }
    }

    pub fn enumeration(values: Vec<Value>) -> Self {
        let mut c = ParamContract::of(ParamType::Enum);
        c.schema.enum_values = Some(values);
        c
    }

    pub fn pattern(mut self, pattern: Option<String>) -> Self {
        self.schema.pattern = pattern;
        self
    }

    pub fn range(mut self, min: Option<Limit>, max: Option<Limit>) -> Self {
        self.runtime.min = min;
        self.runtime.max = max;
        self
    }
}

/// Per tool, per parameter contract.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InteractionMetadata {
    pub tools: BTreeMap<String, BTreeMap<String, ParamContract>>,
}

impl InteractionMetadata {
    pub fn with(mut self, tool: &str, param: &str, contract: ParamContract) -> Self {
        self.tools
            .entry(tool.to_string())
            .or_default()
            .insert(param.to_string(), contract);
        self
    }

    /// Registers a tool that takes no parameters.
    pub fn tool(mut self, tool: &str) -> Self {
        self.tools.entry(tool.to_string()).or_default();
        self
    }

    pub fn param(&self, tool: &str, param: &str) -> Option<&ParamContract> {
        self.tools.get(tool)?.get(param)
    }
}
