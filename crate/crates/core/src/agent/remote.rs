//! Decision backend backed by an OpenAI-compatible chat completion endpoint.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{ActionCommand, AgentError, Backend, DecideContext, Decision};

const SYSTEM_PROMPT: &str = "You operate a web page. Components listed with S (state), T (tools) and M \
(parameter constraints) can be driven directly with a tool call. Prefer a tool call; use a low-level \
event only when no tool fits or a call was refused. Reply with exactly one JSON object, one of:\n\
{\"action\":\"call\",\"key\":K,\"tool\":NAME,\"params\":{...}}\n\
{\"action\":\"atomic\",\"event\":{\"verb\":\"click\"|\"type\"|\"scroll\"|\"hover\",\"target\":ID,\"payload\"?:TEXT,\"direction\"?:\"up\"|\"down\"}}\n\
{\"action\":\"stop\",\"answer\"?:TEXT}\n\
Stop once the task is complete.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteConfig {
    /// Base URL; `/chat/completions` is appended unless already present.
    pub endpoint: String,
    pub model: String,
    pub timeout_ms: u64,
    #[serde(default, skip_serializing)]
    pub api_key: Option<String>,
}

impl RemoteConfig {
    pub fn url(&self) -> String {
        let base = self.endpoint.trim_end_matches('/');
        if base.ends_with("/chat/completions") {
            base.to_string()
        } else {
            format!("{base}/chat/completions")
        }
    }
}

pub struct RemoteBackend {
    cfg: RemoteConfig,
    agent: ureq::Agent,
}

impl RemoteBackend {
    pub fn new(cfg: RemoteConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(cfg.timeout_ms)))
            .http_status_as_error(true)
            .build()
            .into();
        RemoteBackend { cfg, agent }
    }

    /// Chat request body for one decision.
    pub fn request_body(&self, ctx: &DecideContext<'_>) -> Value {
        let tools: Vec<Value> = ctx
            .observation
            .triplets()
            .into_iter()
            .map(|(k, t)| json!({"key": k, "tools": t.signatures, "constraints": t.metadata}))
            .collect();
        let history: Vec<Value> = ctx
            .history
            .iter()
            .map(|s| json!({"action": s.action, "ok": s.outcome.is_success()}))
            .collect();
        let last = ctx
            .observation
            .last_outcome
            .as_ref()
            .map_or(Value::Null, |o| serde_json::to_value(o).unwrap_or(Value::Null));
        let user = format!(
            "Task: {}\n\nPage (step {}):\n{}\nTool schemas:\n{}\n\nLast outcome:\n{}\n\nHistory:\n{}",
            ctx.task.instruction,
            ctx.observation.step_index,
            ctx.observation.text,
            Value::Array(tools),
            last,
            Value::Array(history),
        );
        json!({
            "model": self.cfg.model,
            "temperature": 0,
            "messages": [
                {"role": "system", "content": SYSTEM_PROMPT},
                {"role": "user", "content": user},
            ],
        })
    }
}

/// Pulls the first JSON object out of a model reply, tolerating code fences and chatter.
pub(crate) fn parse_action(content: &str) -> Result<ActionCommand, AgentError> {
    let start = content.find('{').ok_or_else(|| AgentError::Remote("reply has no JSON object".into()))?;
    let mut it = serde_json::Deserializer::from_str(&content[start..]).into_iter::<Value>();
    let v = it
        .next()
        .and_then(Result::ok)
        .ok_or_else(|| AgentError::Remote("reply has no JSON object".into()))?;
    serde_json::from_value(v).map_err(|e| AgentError::Remote(format!("bad action: {e}")))
}

impl Backend for RemoteBackend {
    fn name(&self) -> &str {
        "remote"
    }

    fn decide(&mut self, ctx: &DecideContext<'_>) -> Result<Decision, AgentError> {
        let body = self.request_body(ctx);
        let mut req = self.agent.post(&self.cfg.url());
        if let Some(k) = &self.cfg.api_key {
            req = req.header("Authorization", &format!("Bearer {k}"));
        }
        let reply: Value = req
            .send_json(&body)
            .and_then(|mut r| r.body_mut().read_json())
            .map_err(|e| match e {
                ureq::Error::Timeout(_) => AgentError::Timeout(e.to_string()),
                other => AgentError::Remote(other.to_string()),
            })?;
        let content = reply
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .ok_or_else(|| AgentError::Remote("reply has no message content".into()))?;
        let action = parse_action(content)?;
        let fallback = matches!(action, ActionCommand::Atomic { .. }) && !ctx.observation.triplets().is_empty();
        Ok(Decision { action, fallback })
    }
}
