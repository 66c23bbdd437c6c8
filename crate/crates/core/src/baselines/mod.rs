//! Comparison augmenters: EDA token edits, LLM rephrasing, and
//! boundary blending with LLM relabelling.

mod blend;
mod eda;
mod rephrase;

use serde::{Deserialize, Serialize};

pub use blend::{blend_augment, blend_prompt, match_label, relabel_prompt, BlendSpec};
pub use eda::{
    apply_op, change_count, eda_augment, EdaConfig, EdaOp, StopWords, SynonymLexicon,
};
pub use rephrase::{rephrase_augment, rephrase_prompt};

pub mod method {
    pub use super::blend::METHOD_NAME as BLEND;
    pub use super::eda::METHOD_NAME as EDA;
    pub use super::rephrase::METHOD_NAME as REPHRASE;
}

use crate::corpus::LabeledText;

/// Output of an LLM-backed baseline call.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BaselineRun {
    pub items: Vec<LabeledText>,
    pub prompts: usize,
    /// Candidates discarded after generation (e.g. unmatched relabels).
    pub dropped: usize,
    pub failures: Vec<String>,
}

impl BaselineRun {
    pub fn absorb(&mut self, other: BaselineRun) {
        self.items.extend(other.items);
        self.prompts += other.prompts;
        self.dropped += other.dropped;
        self.failures.extend(other.failures);
    }
}
