//! Blocking client for an Ollama-compatible local model server.
//!
//! Sends `POST {base}/api/chat` with streaming off and falls back to
//! `POST {base}/api/generate` when the chat route answers 404. Only
//! timeouts are retried; a malformed reply is reported as-is so model
//! behaviour is never counted twice.

use std::error::Error as _;
use std::io;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{CompletionRequest, GatewayError, ModelResponse};

pub const DEFAULT_TIMEOUT_MS: u64 = 60_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteConfig {
    pub base_url: String,
    pub model_name: String,
    #[serde(default = "default_timeout")]
    pub timeout_ms: u64,
    #[serde(default = "default_retries")]
    pub retries: u32,
}

fn default_timeout() -> u64 {
    DEFAULT_TIMEOUT_MS
}

fn default_retries() -> u32 {
    1
}

impl RemoteConfig {
    pub fn new(base_url: impl Into<String>, model_name: impl Into<String>) -> Self {
        Self { base_url: base_url.into(), model_name: model_name.into(), timeout_ms: DEFAULT_TIMEOUT_MS, retries: 1 }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.timeout_ms == 0 {
            return Err("timeout_ms must be positive".into());
        }
        if self.base_url.is_empty() {
            return Err("base_url is empty".into());
        }
        Ok(())
    }
}

#[derive(Clone)]
pub struct RemoteClient {
    config: RemoteConfig,
    agent: ureq::Agent,
}

impl RemoteClient {
    pub fn new(config: RemoteConfig) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(Duration::from_millis(config.timeout_ms)).build();
        Self { config, agent }
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    fn url(&self, route: &str) -> String {
        format!("{}{}", self.config.base_url.trim_end_matches('/'), route)
    }

    pub fn complete(&self, request: &CompletionRequest) -> Result<ModelResponse, GatewayError> {
        let started = Instant::now();
        let mut attempts_left = self.config.retries;
        let text = loop {
            match self.complete_once(request) {
                Err(GatewayError::Timeout) if attempts_left > 0 => attempts_left -= 1,
                other => break other?,
            }
        };
        Ok(ModelResponse {
            text,
            latency_ms: started.elapsed().as_secs_f64() * 1e3,
            backend_id: format!("remote:{}", request.model_name),
        })
    }

    fn model<'a>(&'a self, request: &'a CompletionRequest) -> &'a str {
        if request.model_name.is_empty() {
            &self.config.model_name
        } else {
            &request.model_name
        }
    }

    fn complete_once(&self, request: &CompletionRequest) -> Result<String, GatewayError> {
        let mut messages = vec![json!({"role": "system", "content": request.system_prompt})];
        messages.extend(request.user_messages.iter().map(|m| json!({"role": "user", "content": m})));
        let body = json!({
            "model": self.model(request),
            "messages": messages,
            "stream": false,
            "options": {"temperature": request.temperature},
        });
        match self.post("/api/chat", &body) {
            Ok(reply) => extract(&reply, &["message", "content"]),
            Err(GatewayError::HttpStatus(404)) => {
                let mut prompt = request.system_prompt.clone();
                for m in &request.user_messages {
                    prompt.push_str("\n\n");
                    prompt.push_str(m);
                }
                let body = json!({
                    "model": self.model(request),
                    "prompt": prompt,
                    "stream": false,
                    "options": {"temperature": request.temperature},
                });
                let reply = self.post("/api/generate", &body)?;
                extract(&reply, &["response"])
            }
            Err(e) => Err(e),
        }
    }

    fn post(&self, route: &str, body: &Value) -> Result<Value, GatewayError> {
        let response = self
            .agent
            .post(&self.url(route))
            .set("Content-Type", "application/json")
            .send_string(&body.to_string())
            .map_err(map_ureq_error)?;
        let text = response.into_string().map_err(|e| map_io_error(&e))?;
        serde_json::from_str(&text).map_err(|e| GatewayError::MalformedReply(format!("reply is not JSON: {e}")))
    }
}

fn extract(reply: &Value, path: &[&str]) -> Result<String, GatewayError> {
    let mut node = reply;
    for key in path {
        node = node
            .get(key)
            .ok_or_else(|| GatewayError::MalformedReply(format!("missing field `{}`", path.join("."))))?;
    }
    node.as_str()
        .map(str::to_owned)
        .ok_or_else(|| GatewayError::MalformedReply(format!("field `{}` is not a string", path.join("."))))
}

fn map_io_error(e: &io::Error) -> GatewayError {
    match e.kind() {
        io::ErrorKind::TimedOut | io::ErrorKind::WouldBlock => GatewayError::Timeout,
        io::ErrorKind::ConnectionRefused => GatewayError::ConnectionRefused,
        _ => GatewayError::Transport(e.to_string()),
    }
}

fn map_ureq_error(err: ureq::Error) -> GatewayError {
    match err {
        ureq::Error::Status(code, _) => GatewayError::HttpStatus(code),
        ureq::Error::Transport(t) => {
            let mut source = t.source();
            while let Some(s) = source {
                if let Some(io) = s.downcast_ref::<io::Error>() {
                    return map_io_error(io);
                }
                source = s.source();
            }
            match t.kind() {
                ureq::ErrorKind::ConnectionFailed => GatewayError::ConnectionRefused,
                ureq::ErrorKind::BadStatus | ureq::ErrorKind::BadHeader => {
                    GatewayError::MalformedReply(t.to_string())
                }
                _ => GatewayError::Transport(t.to_string()),
            }
        }
    }
}
