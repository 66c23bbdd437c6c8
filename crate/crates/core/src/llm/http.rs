use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{BackendError, BackendReply, ChatBackend, ChatRequest, GatewayError};

/// Environment variable holding the API credential.
pub const API_KEY_ENV: &str = "PROMPTAUG_API_KEY";

#[derive(Serialize)]
struct Message<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct CompletionBody<'a> {
    model: &'a str,
    messages: Vec<Message<'a>>,
    temperature: f64,
    max_tokens: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Deserialize)]
struct CompletionReply {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ReplyMessage,
    #[serde(default)]
    finish_reason: Option<String>,
}

#[derive(Deserialize)]
struct ReplyMessage {
    #[serde(default)]
    content: Option<String>,
}

/// Chat-completions endpoint over HTTP.
pub struct HttpBackend {
    client: reqwest::blocking::Client,
    url: String,
    model: String,
    api_key: String,
}

impl HttpBackend {
    pub fn new(
        url: impl Into<String>,
        model: impl Into<String>,
        api_key: impl Into<String>,
        timeout: Duration,
    ) -> Result<Self, GatewayError> {
        let api_key = api_key.into();
        if api_key.trim().is_empty() {
            return Err(GatewayError::MissingCredential);
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| GatewayError::InvalidRequest(format!("http client: {e}")))?;
        Ok(HttpBackend {
            client,
            url: url.into(),
            model: model.into(),
            api_key,
        })
    }

    /// Reads the credential from [`API_KEY_ENV`].
    pub fn from_env(
        url: impl Into<String>,
        model: impl Into<String>,
        timeout: Duration,
    ) -> Result<Self, GatewayError> {
        let key = std::env::var(API_KEY_ENV).map_err(|_| GatewayError::MissingCredential)?;
        Self::new(url, model, key, timeout)
    }
}

impl ChatBackend for HttpBackend {
    fn send(&self, request: &ChatRequest) -> Result<BackendReply, BackendError> {
        let mut messages = Vec::with_capacity(2);
        if let Some(system) = &request.system_text {
            messages.push(Message {
                role: "system",
                content: system,
            });
        }
        messages.push(Message {
            role: "user",
            content: &request.user_text,
        });
        let body = CompletionBody {
            model: &self.model,
            messages,
            temperature: request.temperature,
            max_tokens: request.max_tokens,
            seed: request.seed_hint,
        };

        let started = Instant::now();
        let response = self
            .client
            .post(&self.url)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        let status = response.status().as_u16();
        let raw = response
            .text()
            .map_err(|e| BackendError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(BackendError::Status {
                code: status,
                body: raw.chars().take(200).collect(),
            });
        }
        let parsed: CompletionReply = serde_json::from_str(&raw)
            .map_err(|e| BackendError::Transport(format!("malformed completion body: {e}")))?;
        let choice = parsed
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| BackendError::Transport("completion has no choices".into()))?;
        Ok(BackendReply {
            text: choice.message.content.unwrap_or_default(),
            truncated: choice.finish_reason.as_deref() == Some("length"),
            latency: started.elapsed(),
        })
    }

    fn describe(&self) -> String {
        format!("{} ({})", self.url, self.model)
    }
}
