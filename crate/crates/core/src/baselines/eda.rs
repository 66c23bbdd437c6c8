use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::LabeledText;
use crate::error::{Error, Result};
use crate::rng_for;

pub const METHOD_NAME: &str = "eda";

const BUNDLED_STOPWORDS: &str = include_str!("../../fixtures/stopwords.txt");
const BUNDLED_LEXICON: &str = include_str!("../../fixtures/lexicon.tsv");

/// Word → synonyms. Keys are lowercase and never list themselves.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynonymLexicon {
    map: BTreeMap<String, Vec<String>>,
    source: Option<PathBuf>,
}

impl SynonymLexicon {
    /// Parses `word<TAB>syn1,syn2,...` lines; `#` starts a comment line.
    pub fn parse(contents: &str, source: Option<&Path>) -> Result<Self> {
        let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (idx, line) in contents.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (word, syns) = line.split_once('\t').ok_or_else(|| Error::Malformed {
                path: source.map(Path::to_path_buf).unwrap_or_default(),
                line: idx + 1,
                message: "expected word<TAB>synonyms".into(),
            })?;
            let word = word.trim().to_lowercase();
            let entry = map.entry(word.clone()).or_default();
            for syn in syns.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                if syn.to_lowercase() != word && !entry.iter().any(|s| s == syn) {
                    entry.push(syn.to_string());
                }
            }
        }
        map.retain(|_, syns| !syns.is_empty());
        Ok(SynonymLexicon {
            map,
            source: source.map(Path::to_path_buf),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&raw, Some(path))
    }

    /// The small lexicon shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEXICON, None).expect("bundled lexicon parses")
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a [&'a str])>) -> Self {
        let text: String = pairs
            .into_iter()
            .map(|(w, syns)| format!("{w}\t{}\n", syns.join(",")))
            .collect();
        Self::parse(&text, None).expect("pairs form a valid lexicon")
    }

    pub fn synonyms(&self, word: &str) -> Option<&[String]> {
        self.map.get(&word.to_lowercase()).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopWords(HashSet<String>);

impl Default for StopWords {
    fn default() -> Self {
        StopWords(
            BUNDLED_STOPWORDS
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }
}

impl StopWords {
    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(&word.to_lowercase())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdaOp {
    SynonymReplacement,
    RandomInsertion,
    RandomSwap,
    RandomDeletion,
}

impl EdaOp {
    pub const ALL: [EdaOp; 4] = [
        EdaOp::SynonymReplacement,
        EdaOp::RandomInsertion,
        EdaOp::RandomSwap,
        EdaOp::RandomDeletion,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdaConfig {
    pub alpha: f64,
    pub n_aug: usize,
}

impl Default for EdaConfig {
    fn default() -> Self {
        EdaConfig { alpha: 0.1, n_aug: 4 }
    }
}

/// max(1, round(alpha · L))
pub fn change_count(alpha: f64, len: usize) -> usize {
    ((alpha * len as f64).round() as usize).max(1)
}

fn replaceable<'a>(tokens: &'a [String], lexicon: &'a SynonymLexicon, stop: &'a StopWords) -> Vec<usize> {
    (0..tokens.len())
        .filter(|&i| !stop.contains(&tokens[i]) && lexicon.synonyms(&tokens[i]).is_some())
        .collect()
}

fn random_swap<R: Rng>(tokens: &mut [String], n: usize, rng: &mut R) {
    if tokens.len() < 2 {
        return;
    }
    for _ in 0..n {
        let i = rng.random_range(0..tokens.len());
        let mut j = rng.random_range(0..tokens.len() - 1);
        if j >= i {
            j += 1;
        }
        tokens.swap(i, j);
    }
}

/// Applies one EDA operation to whitespace tokens.
///
/// Synonym replacement and insertion fall back to a random swap when no
/// token has a lexicon entry.
pub fn apply_op<R: Rng>(
    tokens: &[String],
    op: EdaOp,
    lexicon: &SynonymLexicon,
    stop: &StopWords,
    alpha: f64,
    rng: &mut R,
) -> Vec<String> {
    let mut out = tokens.to_vec();
    let n = change_count(alpha, tokens.len());
    match op {
        EdaOp::SynonymReplacement => {
            let mut positions = replaceable(tokens, lexicon, stop);
            if positions.is_empty() {
                random_swap(&mut out, n, rng);
                return out;
            }
            positions.shuffle(rng);
            for &i in positions.iter().take(n) {
                let syns = lexicon.synonyms(&tokens[i]).expect("position has synonyms");
                out[i] = syns.choose(rng).expect("non-empty synonym list").clone();
            }
        }
        EdaOp::RandomInsertion => {
            let positions = replaceable(tokens, lexicon, stop);
            if positions.is_empty() {
                random_swap(&mut out, n, rng);
                return out;
            }
            for _ in 0..n {
                let src = *positions.choose(rng).expect("non-empty");
                let syn = lexicon
                    .synonyms(&tokens[src])
                    .and_then(|s| s.choose(rng))
                    .expect("non-empty synonym list")
                    .clone();
                let at = rng.random_range(0..=out.len());
                out.insert(at, syn);
            }
        }
        EdaOp::RandomSwap => random_swap(&mut out, n, rng),
        EdaOp::RandomDeletion => {
            if tokens.len() < 2 {
                return out;
            }
            let keep: Vec<bool> = tokens.iter().map(|_| !rng.random_bool(alpha.clamp(0.0, 1.0))).collect();
            let kept = keep.iter().filter(|k| **k).count();
            out = if kept == tokens.len() {
                // nothing removed: delete one token so the variant changes
                let drop = rng.random_range(0..tokens.len());
                tokens.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, t)| t.clone()).collect()
            } else if kept == 0 {
                vec![tokens[rng.random_range(0..tokens.len())].clone()]
            } else {
                tokens.iter().zip(&keep).filter(|(_, k)| **k).map(|(t, _)| t.clone()).collect()
            };
        }
    }
    out
}

/// Produces `n_aug` EDA variants of one datapoint, each from one operation
/// chosen uniformly at random.
pub fn eda_augment(
    item: &LabeledText,
    lexicon: &SynonymLexicon,
    stop: &StopWords,
    alpha: f64,
    n_aug: usize,
    seed: u64,
) -> Result<Vec<LabeledText>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("EDA alpha {alpha} is outside (0, 1)")));
    }
    let tokens: Vec<String> = item.text.split_whitespace().map(String::from).collect();
    if tokens.is_empty() {
        return Err(Error::InvalidArgument(format!("item {} has no tokens", item.id)));
    }
    let mut rng = rng_for(seed, 0);
    let mut out = Vec::with_capacity(n_aug);
    for _ in 0..n_aug {
        let op = *EdaOp::ALL.choose(&mut rng).expect("four operations");
        let variant = apply_op(&tokens, op, lexicon, stop, alpha, &mut rng);
        out.push(LabeledText::augmented(
            variant.join(" "),
            item.label.clone(),
            METHOD_NAME,
            vec![item.id.clone()],
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn lexicon_parsing() {
        let lex = SynonymLexicon::parse("# c\nGood\tgreat, good ,fine\nlone\t\n", None).unwrap();
        assert_eq!(lex.synonyms("good").unwrap(), ["great", "fine"]);
        assert!(lex.synonyms("lone").is_none());
        assert!(SynonymLexicon::parse("no tab here", None).is_err());
        assert!(SynonymLexicon::bundled().len() > 20);
    }

    #[test]
    fn swap_needs_two_tokens() {
        let mut rng = rng_for(1, 0);
        let out = apply_op(&toks("lol"), EdaOp::RandomSwap, &SynonymLexicon::default(), &StopWords::default(), 0.1, &mut rng);
        assert_eq!(out, toks("lol"));
    }

    #[test]
    fn replacement_uses_lexicon() {
        let lex = SynonymLexicon::from_pairs([("good", &["great"][..])]);
        let mut rng = rng_for(42, 0);
        let out = apply_op(&toks("good phone"), EdaOp::SynonymReplacement, &lex, &StopWords::default(), 0.5, &mut rng);
        assert_eq!(out.join(" "), "great phone");
    }

    #[test]
    fn replacement_without_hits_swaps() {
        let mut rng = rng_for(3, 0);
        let out = apply_op(&toks("alpha beta"), EdaOp::SynonymReplacement, &SynonymLexicon::default(), &StopWords::default(), 0.5, &mut rng);
        assert_eq!(out, toks("beta alpha"));
    }

    #[test]
    fn deletion_never_empties() {
        let stop = StopWords::default();
        let lex = SynonymLexicon::default();
        for seed in 0..200 {
            let mut rng = rng_for(seed, 0);
            let out = apply_op(&toks("a b c"), EdaOp::RandomDeletion, &lex, &stop, 0.99, &mut rng);
            assert!(!out.is_empty());
        }
    }

    #[test]
    fn augment_preserves_label_and_is_reproducible() {
        let item = LabeledText::original("you are really a genius with that phone", "Sarcasm");
        let lex = SynonymLexicon::bundled();
        let stop = StopWords::default();
        let a = eda_augment(&item, &lex, &stop, 0.1, 4, 9).unwrap();
        let b = eda_augment(&item, &lex, &stop, 0.1, 4, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|t| t.label == "Sarcasm" && t.source_ids == vec![item.id.clone()]));
        assert!(eda_augment(&item, &lex, &stop, 0.0, 4, 9).is_err());
    }
}
