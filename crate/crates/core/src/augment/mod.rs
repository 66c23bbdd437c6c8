//! The structured-prompt augmentation method.
//!
//! For each class the training examples are shuffled and cut into groups of
//! `k`. Each group seeds one generation prompt asking for `n` new comments in
//! a numbered list. Every parsed candidate then goes through three yes/no
//! assertions (label, characteristic, context) and is kept only when all
//! three answer yes. Passes over freshly reshuffled groups repeat until the
//! class target is met or the pass budget runs out.

mod filter;
mod parse;
mod prompt;

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

pub use filter::{assert_filter, assertion_prompt, Assertion, AssertionTranscript, FilterVerdict};
pub use parse::{parse_numbered_list, ParsedList};
pub use prompt::{
    build_prompt, definition_text, examples_text, instruction_text, Component, PromptBundle,
    PromptSegment, PromptVariant, CONTEXT_TEXT, EXAMPLES_LEAD,
};

use crate::corpus::{ClassSpec, LabeledText};
use crate::error::{Error, Result};
use crate::llm::{ChatRequest, ChatResponse, FinishReason, Gateway, GatewayError, YesNo};
use crate::rng_for;

pub const METHOD_NAME: &str = "promptaug";

/// Seeded shuffle, then consecutive groups of `k`; a short final group is kept.
pub fn group_examples(train_c: &[LabeledText], k: usize, seed: u64) -> Result<Vec<Vec<LabeledText>>> {
    if train_c.is_empty() {
        return Err(Error::InvalidArgument("cannot group an empty class".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("group size k must be positive".into()));
    }
    if let Some(other) = train_c.iter().find(|t| t.label != train_c[0].label) {
        return Err(Error::InvalidArgument(format!(
            "mixed labels in class group: {:?} and {:?}",
            train_c[0].label, other.label
        )));
    }
    let mut shuffled = train_c.to_vec();
    shuffled.shuffle(&mut rng_for(seed, 0));
    Ok(shuffled.chunks(k).map(<[LabeledText]>::to_vec).collect())
}

/// Casefolded, whitespace-collapsed form used for duplicate detection.
pub fn normalize_for_dedup(text: &str) -> String {
    text.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentParams {
    /// Examples per prompt.
    pub k: usize,
    /// Generations requested per prompt.
    pub n: usize,
    pub variant: PromptVariant,
    pub seed: u64,
    pub max_passes: usize,
    /// Dispatch prompts one at a time, in group order.
    pub deterministic: bool,
    /// Worker threads for concurrent dispatch.
    pub concurrency: usize,
}

impl Default for AugmentParams {
    fn default() -> Self {
        AugmentParams {
            k: 3,
            n: 5,
            variant: PromptVariant::Full,
            seed: 0,
            max_passes: 5,
            deterministic: false,
            concurrency: 4,
        }
    }
}

/// One prompt round-trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub pass: usize,
    pub group: usize,
    pub bundle: PromptBundle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<ChatResponse>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub candidates: Vec<String>,
    pub verdicts: Vec<FilterVerdict>,
    pub accepted: Vec<LabeledText>,
    pub duplicates: usize,
}

/// Per-stage tallies for one or more classes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentStats {
    pub prompts: usize,
    pub refusals: usize,
    pub truncated: usize,
    pub response_errors: usize,
    pub parse_failures: usize,
    pub candidates_parsed: usize,
    pub filter_passed: usize,
    pub filter_rejected: usize,
    pub duplicates: usize,
    /// Unique candidates that passed the filter.
    pub accepted: usize,
    /// Accepted items returned after sampling down to the target.
    pub selected: usize,
    pub target: usize,
    pub shortfall: usize,
    pub label_yes: usize,
    pub characteristic_yes: usize,
    pub context_yes: usize,
}

impl AugmentStats {
    /// parsed = accepted + rejected + duplicates
    pub fn reconciles(&self) -> bool {
        self.candidates_parsed == self.accepted + self.filter_rejected + self.duplicates
            && self.filter_passed == self.accepted + self.duplicates
            && self.selected + self.shortfall == self.target
    }

    pub fn absorb(&mut self, other: &AugmentStats) {
        self.prompts += other.prompts;
        self.refusals += other.refusals;
        self.truncated += other.truncated;
        self.response_errors += other.response_errors;
        self.parse_failures += other.parse_failures;
        self.candidates_parsed += other.candidates_parsed;
        self.filter_passed += other.filter_passed;
        self.filter_rejected += other.filter_rejected;
        self.duplicates += other.duplicates;
        self.accepted += other.accepted;
        self.selected += other.selected;
        self.target += other.target;
        self.shortfall += other.shortfall;
        self.label_yes += other.label_yes;
        self.characteristic_yes += other.characteristic_yes;
        self.context_yes += other.context_yes;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAugmentation {
    pub class: String,
    pub accepted: Vec<LabeledText>,
    pub records: Vec<GenerationRecord>,
    pub stats: AugmentStats,
}

impl ClassAugmentation {
    pub fn shortfall(&self) -> usize {
        self.stats.shortfall
    }
}

struct PromptOutcome {
    bundle: PromptBundle,
    raw: Option<ChatResponse>,
    error: Option<String>,
    parsed: Option<ParsedList>,
    verdicts: Vec<FilterVerdict>,
}

fn run_prompt(
    class: &ClassSpec,
    group: &[LabeledText],
    params: &AugmentParams,
    seed_hint: u64,
    gateway: &Gateway,
) -> Result<PromptOutcome> {
    let examples: &[LabeledText] = if params.variant.uses_examples() { group } else { &[] };
    let bundle = build_prompt(class, examples, params.n, params.variant)?;
    let request = ChatRequest::generation(bundle.rendered.clone()).with_seed(seed_hint);
    let raw = match gateway.complete(&request) {
        Ok(raw) => raw,
        Err(e @ (GatewayError::MissingCredential | GatewayError::Unauthorized(_))) => {
            return Err(e.into())
        }
        Err(e) => {
            return Ok(PromptOutcome {
                bundle,
                raw: None,
                error: Some(e.to_string()),
                parsed: None,
                verdicts: Vec::new(),
            })
        }
    };
    let parsable = matches!(raw.finish_reason, FinishReason::Complete | FinishReason::Truncated);
    let (parsed, error) = if parsable {
        match parse_numbered_list(&raw.text, params.n) {
            Ok(p) => (Some(p), None),
            Err(e) => {
                log::info!("discarding unparsable response for {}: {e}", class.name);
                (None, Some(e.to_string()))
            }
        }
    } else {
        (None, raw.error.clone())
    };
    let mut verdicts = Vec::new();
    if let Some(p) = &parsed {
        for candidate in &p.items {
            verdicts.push(assert_filter(candidate, class, gateway)?);
        }
    }
    Ok(PromptOutcome {
        bundle,
        raw: Some(raw),
        error,
        parsed,
        verdicts,
    })
}

fn dispatch(
    class: &ClassSpec,
    groups: &[Vec<LabeledText>],
    params: &AugmentParams,
    pass: usize,
    gateway: &Gateway,
) -> Result<Vec<PromptOutcome>> {
    let seed_hint = |g: usize| params.seed ^ ((pass as u64) << 32) ^ g as u64;
    let sequential =
        params.deterministic || gateway.requires_sequential() || params.concurrency <= 1 || groups.len() <= 1;
    if sequential {
        return groups
            .iter()
            .enumerate()
            .map(|(g, group)| run_prompt(class, group, params, seed_hint(g), gateway))
            .collect();
    }

    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<PromptOutcome>>>> =
        Mutex::new((0..groups.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..params.concurrency.min(groups.len()) {
            scope.spawn(|| loop {
                let g = next.fetch_add(1, Ordering::SeqCst);
                if g >= groups.len() {
                    break;
                }
                let outcome = run_prompt(class, &groups[g], params, seed_hint(g), gateway);
                slots.lock().unwrap_or_else(|e| e.into_inner())[g] = Some(outcome);
            });
        }
    });
    slots
        .into_inner()
        .unwrap_or_else(|e| e.into_inner())
        .into_iter()
        .map(|slot| slot.expect("every group dispatched"))
        .collect()
}

/// Generates up to `target` filtered, deduplicated datapoints for one class.
///
/// Results of a pass are collected in group order before deduplication, so
/// concurrent and sequential dispatch produce the same output for a mock
/// whose replies depend only on request content.
pub fn augment_class(
    class: &ClassSpec,
    train_c: &[LabeledText],
    target: usize,
    params: &AugmentParams,
    gateway: &Gateway,
) -> Result<ClassAugmentation> {
    if train_c.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "class {:?} has no training datapoints",
            class.name
        )));
    }
    if params.n == 0 || params.max_passes == 0 {
        return Err(Error::InvalidArgument("n and max_passes must be positive".into()));
    }
    let mut seen: HashSet<String> = train_c.iter().map(|t| normalize_for_dedup(&t.text)).collect();
    let mut accepted: Vec<LabeledText> = Vec::new();
    let mut records = Vec::new();
    let mut stats = AugmentStats {
        target,
        ..AugmentStats::default()
    };

    for pass in 0..params.max_passes {
        if accepted.len() >= target {
            break;
        }
        let pass_seed = params.seed.wrapping_add(pass as u64);
        let groups = group_examples(train_c, params.k, pass_seed)?;
        for (g, outcome) in dispatch(class, &groups, params, pass, gateway)?.into_iter().enumerate() {
            stats.prompts += 1;
            match outcome.raw.as_ref().map(|r| r.finish_reason) {
                Some(FinishReason::Refused) => stats.refusals += 1,
                Some(FinishReason::Error) | None => stats.response_errors += 1,
                Some(FinishReason::Truncated) => stats.truncated += 1,
                Some(FinishReason::Complete) => {}
            }
            let candidates = outcome.parsed.map(|p| p.items).unwrap_or_default();
            if outcome.raw.as_ref().is_some_and(|r| {
                matches!(r.finish_reason, FinishReason::Complete | FinishReason::Truncated)
            }) && candidates.is_empty()
            {
                stats.parse_failures += 1;
            }
            stats.candidates_parsed += candidates.len();

            let source_ids = outcome.bundle.example_ids();
            let mut record_accepted = Vec::new();
            let mut duplicates = 0;
            for (candidate, verdict) in candidates.iter().zip(&outcome.verdicts) {
                stats.label_yes += (verdict.label_ok == YesNo::Yes) as usize;
                stats.characteristic_yes += (verdict.characteristic_ok == YesNo::Yes) as usize;
                stats.context_yes += (verdict.context_ok == YesNo::Yes) as usize;
                if !verdict.pass() {
                    stats.filter_rejected += 1;
                    continue;
                }
                stats.filter_passed += 1;
                if !seen.insert(normalize_for_dedup(candidate)) {
                    duplicates += 1;
                    continue;
                }
                let item = LabeledText::augmented(
                    candidate.clone(),
                    class.name.clone(),
                    METHOD_NAME,
                    source_ids.clone(),
                );
                record_accepted.push(item.clone());
                accepted.push(item);
            }
            stats.duplicates += duplicates;
            records.push(GenerationRecord {
                pass,
                group: g,
                bundle: outcome.bundle,
                raw: outcome.raw,
                error: outcome.error,
                candidates,
                verdicts: outcome.verdicts,
                accepted: record_accepted,
                duplicates,
            });
        }
    }

    stats.accepted = accepted.len();
    if accepted.len() > target {
        let mut picked =
            rand::seq::index::sample(&mut rng_for(params.seed, 1), accepted.len(), target).into_vec();
        picked.sort_unstable();
        accepted = picked.into_iter().map(|i| accepted[i].clone()).collect();
    }
    stats.selected = accepted.len();
    stats.shortfall = target - accepted.len();
    if stats.shortfall > 0 {
        log::warn!(
            "class {:?}: {} of {} requested datapoints generated",
            class.name,
            accepted.len(),
            target
        );
    }
    Ok(ClassAugmentation {
        class: class.name.clone(),
        accepted,
        records,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::{BackendError, ClosureBackend};

    fn class() -> ClassSpec {
        ClassSpec::new("Sarcasm", "Humorous communication in a cynical tone", "humorous", ["bitter"]).unwrap()
    }

    fn originals(n: usize) -> Vec<LabeledText> {
        (0..n).map(|i| LabeledText::original(format!("original {i}"), "Sarcasm")).collect()
    }

    #[test]
    fn grouping_sizes() {
        let sizes = |n, k| {
            group_examples(&originals(n), k, 1)
                .unwrap()
                .iter()
                .map(Vec::len)
                .collect::<Vec<_>>()
        };
        assert_eq!(sizes(9, 3), vec![3, 3, 3]);
        assert_eq!(sizes(7, 3), vec![3, 3, 1]);
        assert_eq!(sizes(2, 3), vec![2]);
        assert!(group_examples(&[], 3, 1).is_err());
    }

    /// Replies with five candidates derived from the prompt's first example,
    /// and answers every assertion with `answer`.
    fn echo_gateway(answer: &'static str) -> Gateway {
        Gateway::new(ClosureBackend::new(move |req: &ChatRequest| -> Result<String, BackendError> {
            let text = &req.user_text;
            if text.starts_with("In a numbered list") {
                let tag = text
                    .split('"')
                    .nth(1)
                    .unwrap_or("none")
                    .to_string();
                Ok((1..=5).map(|i| format!("{i}. \"{tag} remix {i}\"")).collect::<Vec<_>>().join("\n"))
            } else {
                Ok(answer.to_string())
            }
        }))
    }

    #[test]
    fn reaches_target_in_one_pass() {
        let params = AugmentParams {
            seed: 11,
            ..AugmentParams::default()
        };
        let out = augment_class(&class(), &originals(9), 10, &params, &echo_gateway("yes")).unwrap();
        assert_eq!(out.accepted.len(), 10);
        assert_eq!(out.stats.prompts, 3);
        assert_eq!(out.stats.accepted, 15);
        assert!(out.stats.reconciles());
        for item in &out.accepted {
            assert_eq!(item.method.as_deref(), Some(METHOD_NAME));
            assert!(!item.source_ids.is_empty());
        }
    }

    #[test]
    fn all_rejected_is_full_shortfall() {
        let params = AugmentParams::default();
        let out = augment_class(&class(), &originals(4), 6, &params, &echo_gateway("no")).unwrap();
        assert!(out.accepted.is_empty());
        assert_eq!(out.shortfall(), 6);
        assert_eq!(out.stats.prompts, 2 * params.max_passes);
        assert!(out.stats.reconciles());
    }

    #[test]
    fn duplicates_are_dropped() {
        let gw = Gateway::new(ClosureBackend::new(|req: &ChatRequest| -> Result<String, BackendError> {
            if req.user_text.starts_with("In a numbered list") {
                Ok("1. Nice phone\n2. nice   PHONE\n3. Original 0".into())
            } else {
                Ok("yes".into())
            }
        }));
        let params = AugmentParams {
            max_passes: 1,
            ..AugmentParams::default()
        };
        let out = augment_class(&class(), &originals(3), 5, &params, &gw).unwrap();
        let texts: Vec<_> = out.accepted.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts, vec!["Nice phone"]);
        assert_eq!(out.stats.duplicates, 2);
        assert!(out.stats.reconciles());
    }

    #[test]
    fn concurrent_matches_sequential() {
        let base = AugmentParams {
            seed: 5,
            concurrency: 4,
            ..AugmentParams::default()
        };
        let seq = AugmentParams {
            deterministic: true,
            ..base
        };
        let a = augment_class(&class(), &originals(20), 12, &base, &echo_gateway("yes")).unwrap();
        let b = augment_class(&class(), &originals(20), 12, &seq, &echo_gateway("yes")).unwrap();
        assert_eq!(a, b);
    }
}
