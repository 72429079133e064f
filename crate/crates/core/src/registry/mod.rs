//! The global component registry: mount/unmount lifecycle, triplet reads and validated tool calls.

mod error;
mod validate;

use std::collections::{BTreeMap, BTreeSet};

use rand::RngCore;
use serde::{Deserialize, Serialize};

pub use error::{ConstraintSource, ErrorCode, ErrorDetail, RegistryError, StructuredError};
pub use validate::{validate_params, values_equal};

use crate::component_model::{
    AtomicError, AtomicEvent, AtomicResult, ComponentInstance, ComponentKey, DispatchError, EffectSummary,
    EnvEvent, InteractionMetadata, Params, SemanticStateView, ToolResult, ToolSignature,
};

/// Name under which the registry appears in serialized views.
pub const REGISTRY_NAME: &str = "__ci4a__";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticTriplet {
    pub state: SemanticStateView,
    pub signatures: Vec<ToolSignature>,
    pub metadata: InteractionMetadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolRequest {
    pub key: ComponentKey,
    pub tool: String,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolResponse {
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<SemanticStateView>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effect: Option<EffectSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<EnvEvent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<StructuredError>,
}

impl From<Result<ToolResult, StructuredError>> for ToolResponse {
    fn from(r: Result<ToolResult, StructuredError>) -> Self {
        match r {
            Ok(t) => ToolResponse {
                ok: true,
                state: Some(t.state),
                effect: Some(t.effect),
                events: t.events,
                error: None,
            },
            Err(e) => ToolResponse {
                ok: false,
                state: None,
                effect: None,
                events: Vec::new(),
                error: Some(e),
            },
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    entries: BTreeMap<ComponentKey, ComponentInstance>,
    /// Keys unmounted during this page lifetime; never handed out again.
    retired: BTreeSet<ComponentKey>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, instance: ComponentInstance) -> Result<(), RegistryError> {
        let key = instance.key().to_string();
        if self.entries.contains_key(&key) || self.retired.contains(&key) {
            return Err(RegistryError::DuplicateKey(key));
        }
        log::debug!("mount {key}");
        self.entries.insert(key, instance);
        Ok(())
    }

    pub fn unregister(&mut self, key: &str) -> Result<ComponentInstance, RegistryError> {
        let inst = self
            .entries
            .remove(key)
            .ok_or_else(|| RegistryError::InvalidKey(key.to_string()))?;
        log::debug!("unmount {key}");
        self.retired.insert(key.to_string());
        Ok(inst)
    }

    /// Unmounts everything and starts a fresh page lifetime.
    pub fn teardown(&mut self) {
        self.entries.clear();
        self.retired.clear();
    }

    /// True when `key` could be registered now.
    pub fn is_available(&self, key: &str) -> bool {
        !self.entries.contains_key(key) && !self.retired.contains(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&ComponentInstance> {
        self.entries.get(key)
    }

    /// Direct access for fixtures and tests; agents go through `call_tool`/`apply_atomic`.
    pub fn get_mut(&mut self, key: &str) -> Option<&mut ComponentInstance> {
        self.entries.get_mut(key)
    }

    pub fn get_status(&self, key: &str) -> Result<SemanticTriplet, StructuredError> {
        let inst = self.get(key).ok_or_else(|| StructuredError::invalid_key(key))?;
        Ok(SemanticTriplet {
            state: inst.semantic_state(),
            signatures: inst.tool_signatures(),
            metadata: inst.metadata(),
        })
    }

    /// key, then disabled, then tool and params, then the handler.
    pub fn call_tool(&mut self, key: &str, tool: &str, params: &Params) -> Result<ToolResult, StructuredError> {
        let inst = self.entries.get_mut(key).ok_or_else(|| StructuredError::invalid_key(key))?;
        if inst.is_disabled() {
            return Err(StructuredError::new(
                ErrorCode::ComponentDisabled,
                format!("`{key}` is disabled"),
            ));
        }
        validate_params(&inst.tool_signatures(), &inst.metadata(), tool, params)?;
        inst.dispatch_tool(tool, params).map_err(|e| match e {
            DispatchError::UnknownTool(t) => {
                StructuredError::new(ErrorCode::UnknownTool, format!("tool `{t}` is not offered"))
            }
            DispatchError::Disabled => StructuredError::new(ErrorCode::ComponentDisabled, format!("`{key}` is disabled")),
            DispatchError::HandlerFailure(m) => StructuredError::new(ErrorCode::HandlerFailure, m),
        })
    }

    pub fn handle(&mut self, request: &ToolRequest) -> ToolResponse {
        self.call_tool(&request.key, &request.tool, &request.params).into()
    }

    pub fn apply_atomic(
        &mut self,
        key: &str,
        event: &AtomicEvent,
        noise: f64,
        rng: &mut dyn RngCore,
    ) -> Result<AtomicResult, AtomicError> {
        let inst = self
            .entries
            .get_mut(key)
            .ok_or_else(|| AtomicError::NoSuchTarget(event.target.clone()))?;
        inst.apply_atomic(event, noise, rng)
    }
}
