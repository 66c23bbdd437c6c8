use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{BackendError, BackendReply, ChatBackend, ChatRequest};
use crate::error::{Error, Result};

/// Selects which requests a script entry answers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Matcher {
    /// Request text contains the substring.
    Contains(String),
    /// Request text contains every substring.
    AllOf(Vec<String>),
    /// Zero-based position of the request in the run.
    Index(usize),
}

impl Matcher {
    fn matches(&self, index: usize, text: &str) -> bool {
        match self {
            Matcher::Contains(s) => text.contains(s.as_str()),
            Matcher::AllOf(parts) => parts.iter().all(|p| text.contains(p.as_str())),
            Matcher::Index(i) => *i == index,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockReply {
    #[serde(default)]
    pub text: String,
    #[serde(default)]
    pub truncated: bool,
    /// Simulated HTTP failure status; `text` is ignored when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<u16>,
}

impl MockReply {
    pub fn text(text: impl Into<String>) -> Self {
        MockReply {
            text: text.into(),
            truncated: false,
            status: None,
        }
    }

    pub fn status(code: u16) -> Self {
        MockReply {
            text: String::new(),
            truncated: false,
            status: Some(code),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockEntry {
    #[serde(rename = "match")]
    pub matcher: Matcher,
    pub reply: MockReply,
}

/// Ordered matcher → reply table. The first matching entry wins; requests
/// matching nothing fall through to `default`, or fail when it is absent.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockScript {
    #[serde(default)]
    pub entries: Vec<MockEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<MockReply>,
}

impl MockScript {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&raw).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn uses_sequence_index(&self) -> bool {
        self.entries
            .iter()
            .any(|e| matches!(e.matcher, Matcher::Index(_)))
    }

    pub fn lookup(&self, index: usize, text: &str) -> Option<&MockReply> {
        self.entries
            .iter()
            .find(|e| e.matcher.matches(index, text))
            .map(|e| &e.reply)
            .or(self.default.as_ref())
    }
}

/// Backend replaying a [`MockScript`].
#[derive(Debug)]
pub struct ScriptedBackend {
    script: MockScript,
    counter: AtomicUsize,
}

impl ScriptedBackend {
    pub fn new(script: MockScript) -> Self {
        ScriptedBackend {
            script,
            counter: AtomicUsize::new(0),
        }
    }
}

impl ChatBackend for ScriptedBackend {
    fn send(&self, request: &ChatRequest) -> Result<BackendReply, BackendError> {
        let index = self.counter.fetch_add(1, Ordering::SeqCst);
        let text = request.full_text();
        let reply = self.script.lookup(index, &text).ok_or_else(|| BackendError::NoMatch {
            index,
            excerpt: text.chars().take(80).collect(),
        })?;
        if let Some(code) = reply.status {
            return Err(BackendError::Status {
                code,
                body: "scripted failure".into(),
            });
        }
        Ok(BackendReply {
            text: reply.text.clone(),
            truncated: reply.truncated,
            latency: Duration::ZERO,
        })
    }

    fn requires_sequential(&self) -> bool {
        self.script.uses_sequence_index()
    }

    fn describe(&self) -> String {
        format!("mock script ({} entries)", self.script.entries.len())
    }
}

/// Backend computing replies with a function of the request.
pub struct ClosureBackend<F> {
    respond: F,
}

impl<F> ClosureBackend<F>
where
    F: Fn(&ChatRequest) -> Result<String, BackendError> + Send + Sync,
{
    pub fn new(respond: F) -> Self {
        ClosureBackend { respond }
    }
}

impl<F> ChatBackend for ClosureBackend<F>
where
    F: Fn(&ChatRequest) -> Result<String, BackendError> + Send + Sync,
{
    fn send(&self, request: &ChatRequest) -> Result<BackendReply, BackendError> {
        Ok(BackendReply {
            text: (self.respond)(request)?,
            truncated: false,
            latency: Duration::ZERO,
        })
    }

    fn describe(&self) -> String {
        "closure mock".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_document_shape() {
        let doc = r#"{
            "entries": [
                {"match": {"contains": "Sarcasm"}, "reply": {"text": "1. a"}},
                {"match": {"all_of": ["Does", "contain"]}, "reply": {"text": "yes"}},
                {"match": {"index": 7}, "reply": {"status": 429}}
            ],
            "default": {"text": "no"}
        }"#;
        let script: MockScript = serde_json::from_str(doc).unwrap();
        assert_eq!(script.entries.len(), 3);
        assert!(script.uses_sequence_index());
        assert_eq!(script.lookup(0, "x Sarcasm").unwrap().text, "1. a");
        assert_eq!(script.lookup(0, "Does it contain").unwrap().text, "yes");
        assert_eq!(script.lookup(7, "other").unwrap().status, Some(429));
        assert_eq!(script.lookup(8, "other").unwrap().text, "no");
    }
}
