//! Human-style atomic interaction surface (click, type, scroll, hover).

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScrollDirection {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AtomicVerb {
    Click,
    Type { payload: String },
    Scroll { direction: ScrollDirection },
    Hover,
}

impl AtomicVerb {
    pub fn name(&self) -> &'static str {
        match self {
            AtomicVerb::Click => "click",
            AtomicVerb::Type { .. } => "type",
            AtomicVerb::Scroll { .. } => "scroll",
            AtomicVerb::Hover => "hover",
        }
    }
}

/// A low-level event aimed at one rendered node.
///
/// Wire shape: `{"verb": "click"|"type"|"scroll"|"hover", "target": id, "payload"?: text, "direction"?: "up"|"down"}`.
/// `type` requires `payload`, `scroll` requires `direction`, and no other verb may carry either.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawAtomicEvent", into = "RawAtomicEvent")]
pub struct AtomicEvent {
    pub target: String,
    pub verb: AtomicVerb,
}

impl AtomicEvent {
    pub fn click(target: impl Into<String>) -> Self {
        AtomicEvent {
            target: target.into(),
            verb: AtomicVerb::Click,
        }
    }

    pub fn type_text(target: impl Into<String>, payload: impl Into<String>) -> Self {
        AtomicEvent {
            target: target.into(),
            verb: AtomicVerb::Type {
                payload: payload.into(),
            },
        }
    }

    pub fn scroll(target: impl Into<String>, direction: ScrollDirection) -> Self {
        AtomicEvent {
            target: target.into(),
            verb: AtomicVerb::Scroll { direction },
        }
    }

    pub fn hover(target: impl Into<String>) -> Self {
        AtomicEvent {
            target: target.into(),
            verb: AtomicVerb::Hover,
        }
    }
}

impl fmt::Display for AtomicEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verb {
            AtomicVerb::Type { payload } => write!(f, "type({}, {:?})", self.target, payload),
            AtomicVerb::Scroll { direction } => write!(f, "scroll({}, {:?})", self.target, direction),
            v => write!(f, "{}({})", v.name(), self.target),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawAtomicEvent {
    verb: String,
    target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    payload: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    direction: Option<ScrollDirection>,
}

impl TryFrom<RawAtomicEvent> for AtomicEvent {
    type Error = String;

    fn try_from(raw: RawAtomicEvent) -> Result<Self, Self::Error> {
        let verb = match (raw.verb.as_str(), raw.payload, raw.direction) {
            ("click", None, None) => AtomicVerb::Click,
            ("hover", None, None) => AtomicVerb::Hover,
            ("type", Some(payload), None) => AtomicVerb::Type { payload },
            ("type", None, _) => return Err("type requires a payload".into()),
            ("scroll", None, Some(direction)) => AtomicVerb::Scroll { direction },
            ("scroll", None, None) => return Err("scroll requires a direction".into()),
            ("click" | "hover" | "scroll" | "type", _, _) => {
                return Err(format!("{} does not take this payload", raw.verb))
            }
            (other, _, _) => return Err(format!("unknown verb `{other}`")),
        };
        Ok(AtomicEvent {
            target: raw.target,
            verb,
        })
    }
}

impl From<AtomicEvent> for RawAtomicEvent {
    fn from(e: AtomicEvent) -> Self {
        let verb = e.verb.name().to_string();
        let (payload, direction) = match e.verb {
            AtomicVerb::Type { payload } => (Some(payload), None),
            AtomicVerb::Scroll { direction } => (None, Some(direction)),
            _ => (None, None),
        };
        RawAtomicEvent {
            verb,
            target: e.target,
            payload,
            direction,
        }
    }
}

/// How an atomic event changed the disclosed content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Disclosure {
    /// Content only added.
    Reveal,
    /// Content may have been removed or replaced (collapse, selection, paging).
    Conceal,
    /// Rendered structure untouched.
    None,
}

/// What a widget reports after handling an event.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicEffect {
    pub disclosure: Disclosure,
    pub rejected: Option<String>,
    pub events: Vec<EnvEvent>,
}

impl AtomicEffect {
    pub fn reveal() -> Self {
        Self::with(Disclosure::Reveal)
    }

    pub fn conceal() -> Self {
        Self::with(Disclosure::Conceal)
    }

    pub fn neutral() -> Self {
        Self::with(Disclosure::None)
    }

    pub fn rejected(reason: impl Into<String>) -> Self {
        AtomicEffect {
            disclosure: Disclosure::None,
            rejected: Some(reason.into()),
            events: Vec::new(),
        }
    }

    fn with(disclosure: Disclosure) -> Self {
        AtomicEffect {
            disclosure,
            rejected: None,
            events: Vec::new(),
        }
    }

    pub fn event(mut self, event: EnvEvent) -> Self {
        self.events.push(event);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicResult {
    pub event: AtomicEvent,
    /// False when injected noise swallowed the event.
    pub effective: bool,
    pub changed: bool,
    pub disclosure: Disclosure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejected: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<EnvEvent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[serde(tag = "code", content = "target")]
pub enum AtomicError {
    #[error("no rendered node `{0}`")]
    NoSuchTarget(String),
    #[error("node `{0}` is disabled")]
    TargetDisabled(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Navigate,
    Submit,
    Click,
}

/// Observable environment event (route change, form submission, plain click).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnvEvent {
    pub key: String,
    pub kind: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

impl EnvEvent {
    pub fn new(key: &str, kind: EventKind, value: Option<String>) -> Self {
        EnvEvent {
            key: key.to_string(),
            kind,
            value,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn wire_shape_enforces_payload_rules() {
        let ok: AtomicEvent = serde_json::from_value(json!({"verb": "type", "target": "a", "payload": "x"})).unwrap();
        assert_eq!(ok, AtomicEvent::type_text("a", "x"));
        assert!(serde_json::from_value::<AtomicEvent>(json!({"verb": "type", "target": "a"})).is_err());
        assert!(serde_json::from_value::<AtomicEvent>(json!({"verb": "click", "target": "a", "payload": "x"})).is_err());
        assert!(serde_json::from_value::<AtomicEvent>(json!({"verb": "scroll", "target": "a"})).is_err());
        assert!(serde_json::from_value::<AtomicEvent>(json!({"verb": "drag", "target": "a"})).is_err());
        let s = AtomicEvent::scroll("list", ScrollDirection::Down);
        let back: AtomicEvent = serde_json::from_value(serde_json::to_value(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
