use serde::{Deserialize, Serialize};

use crate::corpus::ClassSpec;
use crate::error::{Error, Result};
use crate::llm::{ChatRequest, Gateway, YesNo};

/// The three checks a generated datapoint must pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assertion {
    Label,
    Characteristic,
    Context,
}

impl Assertion {
    pub const ALL: [Assertion; 3] = [Assertion::Label, Assertion::Characteristic, Assertion::Context];
}

pub fn assertion_prompt(assertion: Assertion, class: &ClassSpec, candidate: &str) -> String {
    match assertion {
        Assertion::Label => format!(
            "Does the following comment contain {}? Answer yes or no.\n{candidate}",
            class.name
        ),
        Assertion::Characteristic => format!(
            "Is the following comment {}? Answer yes or no.\n{candidate}",
            class.characteristic()
        ),
        Assertion::Context => format!(
            "Is the following a social media comment directed at other users (not advice, a definition, or a reply about the behaviour)? Answer yes or no.\n{candidate}"
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssertionTranscript {
    pub assertion: Assertion,
    pub prompt: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer: Option<String>,
    pub outcome: YesNo,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub label_ok: YesNo,
    pub characteristic_ok: YesNo,
    pub context_ok: YesNo,
    #[serde(default)]
    pub transcripts: Vec<AssertionTranscript>,
}

impl FilterVerdict {
    pub fn from_outcomes(label_ok: YesNo, characteristic_ok: YesNo, context_ok: YesNo) -> Self {
        FilterVerdict {
            label_ok,
            characteristic_ok,
            context_ok,
            transcripts: Vec::new(),
        }
    }

    /// True iff all three assertions answered yes.
    pub fn pass(&self) -> bool {
        self.label_ok.is_yes() && self.characteristic_ok.is_yes() && self.context_ok.is_yes()
    }

    pub fn outcome(&self, assertion: Assertion) -> YesNo {
        match assertion {
            Assertion::Label => self.label_ok,
            Assertion::Characteristic => self.characteristic_ok,
            Assertion::Context => self.context_ok,
        }
    }
}

/// Runs the label, characteristic and context queries for one candidate.
///
/// A gateway failure on a query makes that assertion indeterminate and is
/// kept in the transcript.
pub fn assert_filter(candidate: &str, class: &ClassSpec, gateway: &Gateway) -> Result<FilterVerdict> {
    if candidate.trim().is_empty() {
        return Err(Error::InvalidArgument("cannot filter an empty candidate".into()));
    }
    let mut transcripts = Vec::with_capacity(3);
    for assertion in Assertion::ALL {
        let prompt = assertion_prompt(assertion, class, candidate);
        let transcript = match gateway.complete_yes_no(&ChatRequest::judgement(prompt.clone())) {
            Ok(reply) => AssertionTranscript {
                assertion,
                prompt,
                outcome: reply.answer,
                error: reply.response.error.clone(),
                answer: Some(reply.response.text),
            },
            Err(e) => AssertionTranscript {
                assertion,
                prompt,
                answer: None,
                outcome: YesNo::Indeterminate,
                error: Some(e.to_string()),
            },
        };
        transcripts.push(transcript);
    }
    Ok(FilterVerdict {
        label_ok: transcripts[0].outcome,
        characteristic_ok: transcripts[1].outcome,
        context_ok: transcripts[2].outcome,
        transcripts,
    })
}
