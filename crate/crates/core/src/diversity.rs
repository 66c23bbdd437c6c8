//! Lexical diversity of augmented corpora.
//!
//! Corpora are first normalized to a common word budget by seeded sentence
//! sampling, then scored with Dist-1/Dist-2 (higher is more diverse) and
//! Self-BLEU with uniform 1–4-gram weights (lower is more diverse), both
//! within the augmented set and against the original data.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng_for;

pub const TOKEN_RULE: &str = "casefold-whitespace-strip-punct";
pub const BLEU_EPSILON: f64 = 1e-9;
pub const UNIFORM_WEIGHTS: [f64; 4] = [0.25; 4];

fn is_edge_punctuation(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(
            c,
            '“' | '”' | '‘' | '’' | '…' | '«' | '»' | '–' | '—' | '¡' | '¿' | '·'
        )
}

/// Casefold, split on whitespace, strip leading/trailing punctuation, drop empties.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split_whitespace()
        .map(|t| t.trim_matches(is_edge_punctuation))
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedCorpus {
    sentences: Vec<Vec<String>>,
    token_rule: String,
    total_words: usize,
}

impl TokenizedCorpus {
    /// Tokenizes texts; those with no tokens are skipped.
    pub fn from_texts<'a>(texts: impl IntoIterator<Item = &'a str>) -> Self {
        Self::from_sentences(texts.into_iter().map(tokenize).collect())
    }

    pub fn from_sentences(sentences: Vec<Vec<String>>) -> Self {
        let sentences: Vec<Vec<String>> = sentences
            .into_iter()
            .map(|s| s.into_iter().filter(|t| !t.is_empty()).collect::<Vec<_>>())
            .filter(|s| !s.is_empty())
            .collect();
        let total_words = sentences.iter().map(Vec::len).sum();
        TokenizedCorpus {
            sentences,
            token_rule: TOKEN_RULE.to_string(),
            total_words,
        }
    }

    pub fn sentences(&self) -> &[Vec<String>] {
        &self.sentences
    }

    pub fn total_words(&self) -> usize {
        self.total_words
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_rule(&self) -> &str {
        &self.token_rule
    }
}

/// Shuffles sentences and keeps a prefix whose word count first reaches the budget.
pub fn normalize_corpus(corpus: &TokenizedCorpus, word_budget: usize, seed: u64) -> Result<TokenizedCorpus> {
    if word_budget == 0 {
        return Err(Error::Diversity("word budget must be positive".into()));
    }
    if corpus.total_words < word_budget {
        return Err(Error::Diversity(format!(
            "corpus has {} words, fewer than the budget {word_budget}",
            corpus.total_words
        )));
    }
    let mut order: Vec<usize> = (0..corpus.sentences.len()).collect();
    order.shuffle(&mut rng_for(seed, 0));
    let mut taken = Vec::new();
    let mut words = 0;
    for i in order {
        if words >= word_budget {
            break;
        }
        words += corpus.sentences[i].len();
        taken.push(corpus.sentences[i].clone());
    }
    Ok(TokenizedCorpus::from_sentences(taken))
}

/// Distinct n-grams over total n-grams, counted within sentences.
pub fn dist_n(corpus: &TokenizedCorpus, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Diversity("n must be positive".into()));
    }
    let mut distinct: HashSet<&[String]> = HashSet::new();
    let mut total = 0usize;
    for sentence in &corpus.sentences {
        for gram in sentence.windows(n) {
            distinct.insert(gram);
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::Diversity(format!("corpus has no {n}-grams")));
    }
    Ok(distinct.len() as f64 / total as f64)
}

type NgramCounts<'a> = HashMap<&'a [String], usize>;

fn ngram_counts(tokens: &[String], n: usize) -> NgramCounts<'_> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

/// Per-order n-gram counts of one token sequence.
struct Profile<'a> {
    len: usize,
    orders: [NgramCounts<'a>; 4],
}

impl<'a> Profile<'a> {
    fn new(tokens: &'a [String]) -> Self {
        Profile {
            len: tokens.len(),
            orders: [1, 2, 3, 4].map(|n| ngram_counts(tokens, n)),
        }
    }
}

fn closest_ref_len(hyp_len: usize, refs: &[&Profile<'_>]) -> usize {
    refs.iter()
        .map(|r| r.len)
        .min_by_key(|&r| (r.abs_diff(hyp_len), r))
        .expect("at least one reference")
}

fn bleu_from_profiles(hyp: &Profile<'_>, refs: &[&Profile<'_>], weights: &[f64; 4]) -> f64 {
    let mut log_sum = 0.0;
    let mut weight_sum = 0.0;
    for (order, &w) in weights.iter().enumerate() {
        let hyp_counts = &hyp.orders[order];
        let total: usize = hyp_counts.values().sum();
        if total == 0 || w == 0.0 {
            continue;
        }
        let clipped: usize = hyp_counts
            .iter()
            .map(|(gram, &count)| {
                let max_ref = refs
                    .iter()
                    .map(|r| r.orders[order].get(gram).copied().unwrap_or(0))
                    .max()
                    .unwrap_or(0);
                count.min(max_ref)
            })
            .sum();
        let numerator = if clipped == 0 { BLEU_EPSILON } else { clipped as f64 };
        log_sum += w * (numerator / total as f64).ln();
        weight_sum += w;
    }
    if weight_sum == 0.0 {
        return 0.0;
    }
    let c = hyp.len as f64;
    let r = closest_ref_len(hyp.len, refs) as f64;
    let brevity = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    brevity * (log_sum / weight_sum).exp()
}

/// Sentence BLEU with per-reference clipping, epsilon smoothing of zero
/// matches, and weight renormalization over orders the hypothesis is too
/// short to have.
pub fn sentence_bleu(hypothesis: &[String], references: &[Vec<String>], weights: &[f64; 4]) -> Result<f64> {
    if hypothesis.is_empty() {
        return Err(Error::Diversity("empty hypothesis".into()));
    }
    if references.is_empty() || references.iter().any(Vec::is_empty) {
        return Err(Error::Diversity("empty reference set".into()));
    }
    let hyp = Profile::new(hypothesis);
    let profiles: Vec<Profile<'_>> = references.iter().map(|r| Profile::new(r)).collect();
    let refs: Vec<&Profile<'_>> = profiles.iter().collect();
    Ok(bleu_from_profiles(&hyp, &refs, weights))
}

/// Mean sentence BLEU of each sentence against the rest of the corpus
/// (`against = None`) or against another corpus.
pub fn self_bleu(corpus: &TokenizedCorpus, against: Option<&TokenizedCorpus>) -> Result<f64> {
    let profiles: Vec<Profile<'_>> = corpus.sentences.iter().map(|s| Profile::new(s)).collect();
    let scores: Vec<f64> = match against {
        None => {
            if corpus.len() < 2 {
                return Err(Error::Diversity("within-corpus Self-BLEU needs at least 2 sentences".into()));
            }
            (0..profiles.len())
                .into_par_iter()
                .map(|i| {
                    let refs: Vec<&Profile<'_>> = profiles
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, p)| p)
                        .collect();
                    bleu_from_profiles(&profiles[i], &refs, &UNIFORM_WEIGHTS)
                })
                .collect()
        }
        Some(other) => {
            if corpus.is_empty() || other.is_empty() {
                return Err(Error::Diversity("Self-BLEU needs non-empty corpora".into()));
            }
            let others: Vec<Profile<'_>> = other.sentences.iter().map(|s| Profile::new(s)).collect();
            let refs: Vec<&Profile<'_>> = others.iter().collect();
            profiles
                .par_iter()
                .map(|p| bleu_from_profiles(p, &refs, &UNIFORM_WEIGHTS))
                .collect()
        }
    };
    // fixed index order keeps the sum reproducible
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub dist1: f64,
    pub dist2: f64,
    pub self_bleu_within: f64,
    pub self_bleu_vs_orig: f64,
    pub word_budget: usize,
    pub seed: u64,
}

/// floor(0.9 × the smaller corpus word count)
pub fn default_word_budget(corpora: &[&TokenizedCorpus]) -> usize {
    let min = corpora.iter().map(|c| c.total_words()).min().unwrap_or(0);
    (min as f64 * 0.9).floor() as usize
}

/// Normalizes both corpora to the budget and computes all four metrics.
pub fn diversity_report(
    augmented: &TokenizedCorpus,
    original: &TokenizedCorpus,
    word_budget: Option<usize>,
    seed: u64,
) -> Result<DiversityReport> {
    let budget = word_budget.unwrap_or_else(|| default_word_budget(&[augmented, original]));
    let aug = normalize_corpus(augmented, budget, seed)?;
    let orig = normalize_corpus(original, budget, seed.wrapping_add(1))?;
    Ok(DiversityReport {
        dist1: dist_n(&aug, 1)?,
        dist2: dist_n(&aug, 2)?,
        self_bleu_within: self_bleu(&aug, None)?,
        self_bleu_vs_orig: self_bleu(&aug, Some(&orig))?,
        word_budget: budget,
        seed,
    })
}

/// Plain-text table: Dist-1/Dist-2 block, then the two Self-BLEU columns.
pub fn render_diversity_table(rows: &[(String, DiversityReport)]) -> String {
    let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(6);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>8}  {:>8}", "", "Dist-1", "Dist-2");
    for (name, r) in rows {
        let _ = writeln!(out, "{name:<width$}  {:>8.3}  {:>8.3}", r.dist1, r.dist2);
    }
    out.push('\n');
    let _ = writeln!(
        out,
        "{:<width$}  {:>26}  {:>26}",
        "", "Self-BLEU Within Aug Data ↓", "Self-BLEU Aug vs Orig Data ↓"
    );
    for (name, r) in rows {
        let _ = writeln!(
            out,
            "{name:<width$}  {:>26.3}  {:>26.3}",
            r.self_bleu_within, r.self_bleu_vs_orig
        );
    }
    out
}
