//! A separable six-class corpus modelled on the conflict classes, plus a
//! mock LLM that writes new datapoints from each class's full vocabulary.
//!
//! Every sentence carries three words from its class vocabulary and three
//! shared noise words. With little training data much of a class vocabulary
//! is never seen, so augmentation that draws on the whole vocabulary helps
//! in a way the classifier can measure.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::corpus::{stratified_split, ClassSet, ClassSpec, CorpusBundle, LabeledText, SplitRatios};
use crate::error::Result;
use crate::llm::{BackendError, ChatRequest, ClosureBackend, Gateway};
use crate::rng_for;

pub const DATAPOINTS: usize = 500;
pub const WORDS_PER_CLASS: usize = 30;
pub const CLASS_WORDS_PER_SENTENCE: usize = 3;
pub const NOISE_WORDS_PER_SENTENCE: usize = 3;
/// Class words in each mock-generated comment.
pub const MOCK_WORDS: usize = 8;

const NOISE: [&str; 40] = [
    "the", "you", "this", "that", "post", "page", "people", "just", "really", "what", "about",
    "again", "here", "there", "today", "comment", "brand", "product", "phone", "team", "thing",
    "ever", "always", "never", "maybe", "still", "every", "some", "week", "night", "morning",
    "guys", "everyone", "someone", "they", "them", "your", "our", "store", "update",
];

/// (name, communication type, descriptors, word stem)
const CLASSES: [(&str, &str, &[&str], &str); 6] = [
    (
        "Teasing",
        "humorous",
        &["without hostile intent", "light jokes", "banter", "friendly provocation", "mild irony that can be misunderstood"],
        "jest",
    ),
    (
        "Sarcasm",
        "humorous",
        &["cynical tone", "biting", "bitter", "hurtful tone", "including swearwords"],
        "snark",
    ),
    (
        "Criticism",
        "constructive",
        &["without hostile intent", "superiority", "factual disagreements", "without humorous elements"],
        "critq",
    ),
    (
        "Trolling",
        "provocative",
        &["without targeting anyone", "edging conflicts on", "inciting anger", "seeking disapproval", "obvious fake news and misinformation", "seeking response"],
        "troll",
    ),
    (
        "Harassment",
        "abusive",
        &["with hostile intent", "including swearwords", "profanities", "discriminatory language", "no humorous elements"],
        "abuse",
    ),
    (
        "Threats",
        "abusive",
        &["declared intention to act in a negative manner"],
        "threat",
    ),
];

pub fn classes() -> ClassSet {
    ClassSet::new(
        CLASSES
            .iter()
            .map(|(name, comm, desc, _)| {
                let definition = format!("{} communication ({})", capitalize(comm), desc.join(", "));
                ClassSpec::new(*name, definition, *comm, desc.iter().copied()).expect("valid class")
            })
            .collect(),
    )
    .expect("unique class names")
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

/// The full vocabulary of one class, e.g. `snark00..snark29`.
pub fn vocabulary(class: &str) -> Vec<String> {
    let stem = CLASSES
        .iter()
        .find(|c| c.0 == class)
        .map(|c| c.3)
        .unwrap_or("word");
    (0..WORDS_PER_CLASS).map(|i| format!("{stem}{i:02}")).collect()
}

fn sentence<R: Rng>(class: &str, class_words: usize, noise_words: usize, rng: &mut R) -> String {
    let vocab = vocabulary(class);
    let mut words: Vec<String> = (0..class_words)
        .map(|_| vocab.choose(rng).expect("vocabulary").clone())
        .collect();
    words.extend((0..noise_words).map(|_| NOISE.choose(rng).expect("noise").to_string()));
    words.shuffle(rng);
    words.join(" ")
}

/// `DATAPOINTS` original items spread as evenly as possible over the classes.
pub fn corpus(seed: u64) -> Vec<LabeledText> {
    let mut rng = rng_for(seed, 0);
    let mut out = Vec::with_capacity(DATAPOINTS);
    for i in 0..DATAPOINTS {
        let (name, ..) = CLASSES[i % CLASSES.len()];
        let text = sentence(name, CLASS_WORDS_PER_SENTENCE, NOISE_WORDS_PER_SENTENCE, &mut rng);
        out.push(LabeledText::original(text, name));
    }
    out
}

/// The corpus split 80/10/10 with the same seed.
pub fn bundle(seed: u64) -> Result<CorpusBundle> {
    stratified_split(&corpus(seed), &classes(), SplitRatios::default(), seed)
}

fn prompt_seed(text: &str) -> u64 {
    text.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

/// Mock LLM: generation prompts get `n` numbered comments built from the
/// requested class's full vocabulary; every other prompt gets "Yes".
/// Replies depend only on the request text and seed hint.
pub fn vocabulary_restoring_gateway() -> Gateway {
    let names: Vec<&'static str> = CLASSES.iter().map(|c| c.0).collect();
    Gateway::new(ClosureBackend::new(move |req: &ChatRequest| -> Result<String, BackendError> {
        let text = &req.user_text;
        let Some(rest) = text.strip_prefix("In a numbered list, write ") else {
            return Ok("Yes".into());
        };
        let n: usize = rest
            .split_whitespace()
            .next()
            .and_then(|w| w.parse().ok())
            .unwrap_or(5);
        let head = text.lines().next().unwrap_or("");
        let class = names
            .iter()
            .find(|c| head.contains(&format!("containing {c}")))
            .copied()
            .unwrap_or(names[0]);
        let mut rng = rng_for(prompt_seed(text), req.seed_hint.unwrap_or(0));
        Ok((1..=n)
            .map(|i| format!("{i}. {}", sentence(class, MOCK_WORDS, 0, &mut rng)))
            .collect::<Vec<_>>()
            .join("\n"))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::{augment_class, AugmentParams};

    #[test]
    fn corpus_shape() {
        let c = corpus(0);
        assert_eq!(c.len(), DATAPOINTS);
        let b = bundle(0).unwrap();
        assert_eq!(b.train().len() + b.validation().len() + b.test().len(), DATAPOINTS);
        assert_eq!(classes().len(), 6);
        assert_eq!(classes().get("Threats").unwrap().characteristic(), "abusive communication (declared intention to act in a negative manner)");
    }

    #[test]
    fn class_vocabularies_are_disjoint() {
        let all: Vec<String> = CLASSES.iter().flat_map(|c| vocabulary(c.0)).collect();
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
        assert!(all.iter().all(|w| !NOISE.contains(&w.as_str())));
    }

    #[test]
    fn mock_fills_targets() {
        let b = bundle(1).unwrap();
        let class = classes().get("Sarcasm").unwrap().clone();
        let train_c = b.train_of("Sarcasm");
        let out = augment_class(&class, &train_c, 12, &AugmentParams::default(), &vocabulary_restoring_gateway()).unwrap();
        assert_eq!(out.accepted.len(), 12);
        assert!(out.accepted.iter().all(|t| t.text.split(' ').all(|w| w.starts_with("snark"))));
    }
}
