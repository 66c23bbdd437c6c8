//! Chat-completion gateway.
//!
//! [`Gateway`] wraps a [`ChatBackend`] with the retry policy, refusal
//! detection and a cap on in-flight requests. Two backends ship with the
//! crate: [`HttpBackend`] for chat-completions endpoints and
//! [`ScriptedBackend`] for deterministic runs driven by a [`MockScript`].

mod http;
mod mock;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use http::{HttpBackend, API_KEY_ENV};
pub use mock::{ClosureBackend, Matcher, MockEntry, MockReply, MockScript, ScriptedBackend};

pub const GENERATION_TEMPERATURE: f64 = 0.7;
pub const JUDGEMENT_TEMPERATURE: f64 = 0.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system_text: Option<String>,
    pub user_text: String,
    pub temperature: f64,
    pub max_tokens: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_hint: Option<u64>,
}

impl ChatRequest {
    /// Request for free-form generation.
    pub fn generation(user_text: impl Into<String>) -> Self {
        ChatRequest {
            system_text: None,
            user_text: user_text.into(),
            temperature: GENERATION_TEMPERATURE,
            max_tokens: 512,
            seed_hint: None,
        }
    }

    /// Request for a short deterministic answer such as yes/no or a label.
    pub fn judgement(user_text: impl Into<String>) -> Self {
        ChatRequest {
            system_text: None,
            user_text: user_text.into(),
            temperature: JUDGEMENT_TEMPERATURE,
            max_tokens: 16,
            seed_hint: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed_hint = Some(seed);
        self
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        if self.user_text.trim().is_empty() {
            return Err(GatewayError::InvalidRequest("user_text is empty".into()));
        }
        if self.max_tokens < 16 {
            return Err(GatewayError::InvalidRequest(format!(
                "max_tokens {} is below 16",
                self.max_tokens
            )));
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(GatewayError::InvalidRequest(format!(
                "temperature {} is invalid",
                self.temperature
            )));
        }
        Ok(())
    }

    /// System and user text as one string, used by substring matchers.
    pub fn full_text(&self) -> String {
        match &self.system_text {
            Some(system) => format!("{system}\n{}", self.user_text),
            None => self.user_text.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FinishReason {
    Complete,
    Truncated,
    Refused,
    Error,
}

mod duration_ms {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub text: String,
    pub finish_reason: FinishReason,
    #[serde(rename = "latency_ms", with = "duration_ms")]
    pub latency: Duration,
    pub attempt_count: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// What a backend hands back for one attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct BackendReply {
    pub text: String,
    pub truncated: bool,
    pub latency: Duration,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BackendError {
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("HTTP status {code}: {body}")]
    Status { code: u16, body: String },
    #[error("missing credential")]
    MissingCredential,
    #[error("no mock script entry matches request #{index}: {excerpt:?}")]
    NoMatch { index: usize, excerpt: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GatewayError {
    #[error("missing credential: set {API_KEY_ENV}")]
    MissingCredential,
    #[error("credential rejected (HTTP {0})")]
    Unauthorized(u16),
    #[error("non-retryable HTTP status {code}: {body}")]
    HttpStatus { code: u16, body: String },
    #[error("no mock script entry matches request #{index}: {excerpt:?}")]
    NoScriptMatch { index: usize, excerpt: String },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

pub trait ChatBackend: Send + Sync {
    fn send(&self, request: &ChatRequest) -> Result<BackendReply, BackendError>;

    /// Whether requests must be dispatched one at a time, in order.
    fn requires_sequential(&self) -> bool {
        false
    }

    fn describe(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetryPolicy {
    /// Retries after the first attempt.
    pub max_retries: u32,
    /// Delay before the first retry; doubles for each further retry.
    #[serde(with = "duration_ms")]
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            base_delay: Duration::from_secs(1),
        }
    }
}

impl RetryPolicy {
    pub fn delay_before_retry(&self, retry: u32) -> Duration {
        self.base_delay * 2u32.saturating_pow(retry.saturating_sub(1))
    }
}

pub fn default_refusal_phrases() -> Vec<String> {
    ["I cannot", "I can't", "As an AI", "I apologize"]
        .into_iter()
        .map(String::from)
        .collect()
}

/// Tri-state answer of a yes/no query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YesNo {
    Yes,
    No,
    Indeterminate,
}

impl YesNo {
    /// Indeterminate counts as a negative answer.
    pub fn is_yes(self) -> bool {
        self == YesNo::Yes
    }
}

/// Case-insensitive match of the first alphabetic token against yes/no.
pub fn parse_yes_no(text: &str) -> YesNo {
    let token: String = text
        .chars()
        .skip_while(|c| !c.is_alphabetic())
        .take_while(|c| c.is_alphabetic())
        .collect::<String>()
        .to_lowercase();
    match token.as_str() {
        "yes" => YesNo::Yes,
        "no" => YesNo::No,
        _ => YesNo::Indeterminate,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YesNoAnswer {
    pub answer: YesNo,
    pub response: ChatResponse,
}

fn starts_with_list_marker(line: &str) -> bool {
    let digits = line.chars().take_while(|c| c.is_ascii_digit()).count();
    digits > 0 && matches!(line[digits..].chars().next(), Some('.') | Some(')'))
}

struct Limiter {
    cap: usize,
    in_flight: Mutex<usize>,
    freed: Condvar,
}

impl Limiter {
    fn acquire(&self) -> Permit<'_> {
        let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        while *n >= self.cap {
            n = self.freed.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n += 1;
        Permit(self)
    }
}

struct Permit<'a>(&'a Limiter);

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut n = self.0.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.0.freed.notify_one();
    }
}

/// Shared entry point for every LLM call.
#[derive(Clone)]
pub struct Gateway {
    inner: Arc<GatewayInner>,
}

struct GatewayInner {
    backend: Box<dyn ChatBackend>,
    retry: RetryPolicy,
    refusal_phrases: Vec<String>,
    limiter: Limiter,
    requests: AtomicU64,
    attempts: AtomicU64,
}

impl std::fmt::Debug for Gateway {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Gateway")
            .field("backend", &self.inner.backend.describe())
            .field("retry", &self.inner.retry)
            .finish()
    }
}

pub struct GatewayBuilder {
    backend: Box<dyn ChatBackend>,
    retry: RetryPolicy,
    refusal_phrases: Vec<String>,
    max_in_flight: usize,
}

impl GatewayBuilder {
    pub fn retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn refusal_phrases(mut self, phrases: Vec<String>) -> Self {
        self.refusal_phrases = phrases;
        self
    }

    pub fn max_in_flight(mut self, cap: usize) -> Self {
        self.max_in_flight = cap.max(1);
        self
    }

    pub fn build(self) -> Gateway {
        let cap = if self.backend.requires_sequential() {
            1
        } else {
            self.max_in_flight
        };
        Gateway {
            inner: Arc::new(GatewayInner {
                backend: self.backend,
                retry: self.retry,
                refusal_phrases: self.refusal_phrases,
                limiter: Limiter {
                    cap,
                    in_flight: Mutex::new(0),
                    freed: Condvar::new(),
                },
                requests: AtomicU64::new(0),
                attempts: AtomicU64::new(0),
            }),
        }
    }
}

impl Gateway {
    pub fn builder(backend: impl ChatBackend + 'static) -> GatewayBuilder {
        GatewayBuilder {
            backend: Box::new(backend),
            retry: RetryPolicy::default(),
            refusal_phrases: default_refusal_phrases(),
            max_in_flight: 4,
        }
    }

    pub fn new(backend: impl ChatBackend + 'static) -> Self {
        Self::builder(backend).build()
    }

    /// Gateway over a mock script; retries never sleep.
    pub fn mock(script: MockScript) -> Self {
        Self::builder(ScriptedBackend::new(script))
            .retry(RetryPolicy {
                base_delay: Duration::ZERO,
                ..RetryPolicy::default()
            })
            .build()
    }

    pub fn requires_sequential(&self) -> bool {
        self.inner.backend.requires_sequential()
    }

    pub fn describe(&self) -> String {
        self.inner.backend.describe()
    }

    /// Number of `complete` calls issued so far.
    pub fn request_count(&self) -> u64 {
        self.inner.requests.load(Ordering::Relaxed)
    }

    /// Number of backend attempts, retries included.
    pub fn attempt_count(&self) -> u64 {
        self.inner.attempts.load(Ordering::Relaxed)
    }

    fn is_refusal(&self, text: &str) -> bool {
        let Some(first) = text.lines().map(str::trim).find(|l| !l.is_empty()) else {
            return false;
        };
        if starts_with_list_marker(first) {
            return false;
        }
        let lower = first.to_lowercase();
        self.inner
            .refusal_phrases
            .iter()
            .any(|p| lower.contains(&p.to_lowercase()))
    }

    pub fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        request.validate()?;
        self.inner.requests.fetch_add(1, Ordering::Relaxed);
        let retry = self.inner.retry;
        let mut latency = Duration::ZERO;
        let mut attempt = 0u32;
        loop {
            attempt += 1;
            self.inner.attempts.fetch_add(1, Ordering::Relaxed);
            let outcome = {
                let _permit = self.inner.limiter.acquire();
                self.inner.backend.send(request)
            };
            let transient = match outcome {
                Ok(reply) => {
                    latency += reply.latency;
                    let finish_reason = if reply.text.trim().is_empty() {
                        FinishReason::Error
                    } else if self.is_refusal(&reply.text) {
                        FinishReason::Refused
                    } else if reply.truncated {
                        FinishReason::Truncated
                    } else {
                        FinishReason::Complete
                    };
                    let error = (finish_reason == FinishReason::Error)
                        .then(|| "empty response".to_string());
                    return Ok(ChatResponse {
                        text: reply.text,
                        finish_reason,
                        latency,
                        attempt_count: attempt,
                        error,
                    });
                }
                Err(BackendError::Transport(msg)) => msg,
                Err(BackendError::Status { code, body }) if code == 429 || code >= 500 => {
                    format!("HTTP {code}: {body}")
                }
                Err(BackendError::Status { code, .. }) if code == 401 || code == 403 => {
                    return Err(GatewayError::Unauthorized(code));
                }
                Err(BackendError::Status { code, body }) => {
                    return Err(GatewayError::HttpStatus { code, body });
                }
                Err(BackendError::MissingCredential) => return Err(GatewayError::MissingCredential),
                Err(BackendError::NoMatch { index, excerpt }) => {
                    return Err(GatewayError::NoScriptMatch { index, excerpt });
                }
            };
            if attempt > retry.max_retries {
                log::warn!("retry budget exhausted after {attempt} attempts: {transient}");
                return Ok(ChatResponse {
                    text: String::new(),
                    finish_reason: FinishReason::Error,
                    latency,
                    attempt_count: attempt,
                    error: Some(format!("retry budget exhausted: {transient}")),
                });
            }
            let delay = retry.delay_before_retry(attempt);
            log::debug!("transient failure ({transient}); retrying in {delay:?}");
            if !delay.is_zero() {
                std::thread::sleep(delay);
            }
        }
    }

    /// Yes/no query. Error responses are indeterminate.
    pub fn complete_yes_no(&self, request: &ChatRequest) -> Result<YesNoAnswer, GatewayError> {
        let response = self.complete(request)?;
        let answer = if response.finish_reason == FinishReason::Error {
            YesNo::Indeterminate
        } else {
            parse_yes_no(&response.text)
        };
        Ok(YesNoAnswer { answer, response })
    }
}
