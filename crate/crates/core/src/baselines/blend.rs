use serde::{Deserialize, Serialize};

use super::BaselineRun;
use crate::augment::parse_numbered_list;
use crate::corpus::{ClassSet, LabeledText};
use crate::error::{Error, Result};
use crate::llm::{ChatRequest, FinishReason, Gateway, GatewayError};

pub const METHOD_NAME: &str = "blend";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlendSpec {
    pub primary: String,
    pub secondary: String,
    /// Share of the primary class, strictly between 0.5 and 1.
    pub mix: f64,
}

impl BlendSpec {
    pub fn new(primary: impl Into<String>, secondary: impl Into<String>, mix: f64) -> Result<Self> {
        let spec = BlendSpec {
            primary: primary.into(),
            secondary: secondary.into(),
            mix,
        };
        if spec.primary == spec.secondary {
            return Err(Error::InvalidArgument("blend classes must differ".into()));
        }
        if !(mix > 0.5 && mix < 1.0) {
            return Err(Error::InvalidArgument(format!("blend mix {mix} is outside (0.5, 1)")));
        }
        Ok(spec)
    }
}

fn percent(x: f64) -> String {
    format!("{}%", (x * 100.0).round() as i64)
}

fn quoted(examples: &[LabeledText]) -> String {
    examples.iter().map(|e| format!("\"{}\"", e.text)).collect::<Vec<_>>().join(",\n")
}

pub fn blend_prompt(
    spec: &BlendSpec,
    classes: &ClassSet,
    primary_examples: &[LabeledText],
    secondary_examples: &[LabeledText],
    n: usize,
) -> Result<String> {
    let lookup = |name: &str| {
        classes.get(name).ok_or_else(|| Error::UnknownLabel {
            label: name.to_string(),
        })
    };
    let primary = lookup(&spec.primary)?;
    let secondary = lookup(&spec.secondary)?;
    Ok(format!(
        "In a numbered list, write {n} new social media comments directed at other users that are {} {} and {} {}.\n\
         {} is defined as; {}\n{} is defined as; {}\n\
         Here are some examples of {};\n\n{}\n\nHere are some examples of {};\n\n{}",
        percent(spec.mix),
        primary.name,
        percent(1.0 - spec.mix),
        secondary.name,
        primary.name,
        primary.characteristic(),
        secondary.name,
        secondary.characteristic(),
        primary.name,
        quoted(primary_examples),
        secondary.name,
        quoted(secondary_examples),
    ))
}

pub fn relabel_prompt(classes: &ClassSet, candidate: &str) -> String {
    format!(
        "Which one of the following labels best describes the comment? Labels: {}. Answer with the label only.\n{candidate}",
        classes.names().join(", ")
    )
}

/// Maps a relabel answer to a class name: exact (case-insensitive) match of
/// the answer's first line, else the single class name it mentions.
pub fn match_label(answer: &str, classes: &ClassSet) -> Option<String> {
    let first = answer.lines().map(str::trim).find(|l| !l.is_empty())?;
    let cleaned = first
        .trim_matches(|c: char| !c.is_alphanumeric())
        .trim_start_matches("Label:")
        .trim()
        .to_lowercase();
    if let Some(name) = classes.names().into_iter().find(|n| n.to_lowercase() == cleaned) {
        return Some(name.to_string());
    }
    let words: Vec<String> = first
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect();
    let mentioned: Vec<&str> = classes
        .names()
        .into_iter()
        .filter(|n| words.iter().any(|w| *w == n.to_lowercase()))
        .collect();
    match mentioned.as_slice() {
        [only] => Some(only.to_string()),
        _ => None,
    }
}

/// Generates boundary comments mixing two classes, then relabels each one
/// by asking the LLM to pick a label from the whole class set.
pub fn blend_augment(
    spec: &BlendSpec,
    classes: &ClassSet,
    primary_examples: &[LabeledText],
    secondary_examples: &[LabeledText],
    n: usize,
    gateway: &Gateway,
) -> Result<BaselineRun> {
    if primary_examples.is_empty() || secondary_examples.is_empty() {
        return Err(Error::InvalidArgument(
            "blend needs at least one example of each class".into(),
        ));
    }
    let prompt = blend_prompt(spec, classes, primary_examples, secondary_examples, n)?;
    let source_ids: Vec<String> = primary_examples
        .iter()
        .chain(secondary_examples)
        .map(|e| e.id.clone())
        .collect();
    let fatal = |e: GatewayError| matches!(e, GatewayError::MissingCredential | GatewayError::Unauthorized(_));

    let mut run = BaselineRun {
        prompts: 1,
        ..BaselineRun::default()
    };
    let response = match gateway.complete(&ChatRequest::generation(prompt)) {
        Ok(r) => r,
        Err(e) if fatal(e.clone()) => return Err(e.into()),
        Err(e) => {
            run.failures.push(e.to_string());
            return Ok(run);
        }
    };
    if !matches!(response.finish_reason, FinishReason::Complete | FinishReason::Truncated) {
        run.failures.push(format!("blend response {:?}", response.finish_reason));
        return Ok(run);
    }
    let candidates = match parse_numbered_list(&response.text, n) {
        Ok(p) => p.items,
        Err(e) => {
            run.failures.push(e.to_string());
            return Ok(run);
        }
    };
    for candidate in candidates {
        let answer = match gateway.complete(&ChatRequest::judgement(relabel_prompt(classes, &candidate))) {
            Ok(r) => r.text,
            Err(e) if fatal(e.clone()) => return Err(e.into()),
            Err(e) => {
                run.failures.push(e.to_string());
                run.dropped += 1;
                continue;
            }
        };
        match match_label(&answer, classes) {
            Some(label) => run.items.push(LabeledText::augmented(
                candidate,
                label,
                METHOD_NAME,
                source_ids.clone(),
            )),
            None => {
                log::debug!("relabel answer {answer:?} matches no class; dropping");
                run.dropped += 1;
            }
        }
    }
    Ok(run)
}
