//! LLM-based text data augmentation with structured prompts and conjunctive
//! assertion filtering, plus baseline augmenters, corpus diversity metrics and
//! a lightweight extrinsic evaluation harness.
//!
//! The main entry points are:
//!
//! - [`corpus`]: loading, stratified splits, scarcity subsampling, ratio mixing
//! - [`llm`]: chat-completion gateway with a live HTTP backend and a scripted mock
//! - [`augment`]: prompt assembly, numbered-list parsing, assertion filtering
//! - [`baselines`]: EDA, rephrase and boundary-blend augmenters
//! - [`diversity`]: Dist-n and Self-BLEU over word-budget normalized corpora
//! - [`eval`]: hashed-feature classifier, metrics, paired t-test, agreement
//! - [`runner`]: the `promptaug` command line and run manifests

pub mod augment;
pub mod baselines;
pub mod corpus;
pub mod diversity;
pub mod error;
pub mod eval;
pub mod llm;
pub mod pipeline;
pub mod runner;
pub mod synthetic;

pub use error::{Error, Result};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded generator for one independent stream under a run seed.
pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
