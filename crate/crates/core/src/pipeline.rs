//! One interface over every augmentation method, so experiments can swap
//! them freely. Augmenters only ever see the training split.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::augment::{augment_class, group_examples, AugmentParams, AugmentStats, GenerationRecord};
use crate::baselines::{
    blend_augment, eda_augment, rephrase_augment, BaselineRun, BlendSpec, EdaConfig, StopWords,
    SynonymLexicon,
};
use crate::corpus::{CorpusBundle, LabeledText, MixRatio};
use crate::error::{Error, Result};
use crate::llm::Gateway;
use crate::rng_for;

/// Everything an augmenter produced for one bundle.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AugmentOutput {
    pub method: String,
    pub items: Vec<LabeledText>,
    /// Present for the structured-prompt method only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<AugmentStats>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_class: BTreeMap<String, AugmentStats>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<GenerationRecord>,
    /// Per-class quota minus items produced, summed over classes.
    pub shortfall: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

pub trait Augmenter: Sync {
    fn name(&self) -> &str;

    /// Produces augmented items from `bundle.train()`; `ratio` sets the
    /// per-class quota that mixing will later enforce.
    fn augment(&self, bundle: &CorpusBundle, ratio: MixRatio, seed: u64) -> Result<AugmentOutput>;
}

fn class_seed(seed: u64, class_idx: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(class_idx as u64)
}

fn shortfall(bundle: &CorpusBundle, items: &[LabeledText], ratio: MixRatio) -> usize {
    bundle
        .classes()
        .names()
        .into_iter()
        .map(|c| {
            let quota = ratio.quota(bundle.train().iter().filter(|t| t.label == c).count());
            quota.saturating_sub(items.iter().filter(|t| t.label == c).count())
        })
        .sum()
}

/// Adds nothing; the unaugmented baseline.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Augmenter for Identity {
    fn name(&self) -> &str {
        "orig"
    }

    fn augment(&self, _: &CorpusBundle, _: MixRatio, _: u64) -> Result<AugmentOutput> {
        Ok(AugmentOutput {
            method: self.name().into(),
            ..AugmentOutput::default()
        })
    }
}

pub struct PromptAug {
    pub gateway: Gateway,
    pub params: AugmentParams,
}

impl Augmenter for PromptAug {
    fn name(&self) -> &str {
        crate::augment::METHOD_NAME
    }

    fn augment(&self, bundle: &CorpusBundle, ratio: MixRatio, seed: u64) -> Result<AugmentOutput> {
        let mut out = AugmentOutput {
            method: self.name().into(),
            stats: Some(AugmentStats::default()),
            ..AugmentOutput::default()
        };
        for (idx, class) in bundle.classes().iter().enumerate() {
            let train_c = bundle.train_of(&class.name);
            if train_c.is_empty() {
                continue;
            }
            let params = AugmentParams {
                seed: class_seed(seed, idx),
                ..self.params
            };
            let result = augment_class(class, &train_c, ratio.quota(train_c.len()), &params, &self.gateway)?;
            if let Some(stats) = out.stats.as_mut() {
                stats.absorb(&result.stats);
            }
            out.shortfall += result.stats.shortfall;
            out.per_class.insert(class.name.clone(), result.stats.clone());
            out.items.extend(result.accepted);
            out.records.extend(result.records);
        }
        Ok(out)
    }
}

pub struct Eda {
    pub lexicon: SynonymLexicon,
    pub stop_words: StopWords,
    pub config: EdaConfig,
}

impl Default for Eda {
    fn default() -> Self {
        Eda {
            lexicon: SynonymLexicon::bundled(),
            stop_words: StopWords::default(),
            config: EdaConfig::default(),
        }
    }
}

impl Augmenter for Eda {
    fn name(&self) -> &str {
        crate::baselines::method::EDA
    }

    fn augment(&self, bundle: &CorpusBundle, ratio: MixRatio, seed: u64) -> Result<AugmentOutput> {
        let mut items = Vec::new();
        for (i, item) in bundle.train().iter().enumerate() {
            items.extend(eda_augment(
                item,
                &self.lexicon,
                &self.stop_words,
                self.config.alpha,
                self.config.n_aug,
                class_seed(seed, i),
            )?);
        }
        Ok(AugmentOutput {
            method: self.name().into(),
            shortfall: shortfall(bundle, &items, ratio),
            items,
            ..AugmentOutput::default()
        })
    }
}

/// Rephrases training items in seeded order until each class quota is covered.
pub struct Rephrase {
    pub gateway: Gateway,
    pub n: usize,
}

impl Augmenter for Rephrase {
    fn name(&self) -> &str {
        crate::baselines::method::REPHRASE
    }

    fn augment(&self, bundle: &CorpusBundle, ratio: MixRatio, seed: u64) -> Result<AugmentOutput> {
        let mut run = BaselineRun::default();
        for (idx, class) in bundle.classes().iter().enumerate() {
            let mut train_c = bundle.train_of(&class.name);
            let quota = ratio.quota(train_c.len());
            train_c.shuffle(&mut rng_for(class_seed(seed, idx), 0));
            let mut produced = 0;
            for item in &train_c {
                if produced >= quota {
                    break;
                }
                let r = rephrase_augment(item, self.n, &self.gateway)?;
                produced += r.items.len();
                run.absorb(r);
            }
        }
        Ok(AugmentOutput {
            method: self.name().into(),
            shortfall: shortfall(bundle, &run.items, ratio),
            items: run.items,
            failures: run.failures,
            ..AugmentOutput::default()
        })
    }
}

/// One blend prompt per group of `k` primary-class examples, each paired
/// with a randomly chosen secondary class.
pub struct Blend {
    pub gateway: Gateway,
    pub k: usize,
    pub n: usize,
    pub mix: f64,
}

impl Augmenter for Blend {
    fn name(&self) -> &str {
        crate::baselines::method::BLEND
    }

    fn augment(&self, bundle: &CorpusBundle, ratio: MixRatio, seed: u64) -> Result<AugmentOutput> {
        let classes = bundle.classes();
        let present: Vec<&str> = classes
            .names()
            .into_iter()
            .filter(|c| bundle.train().iter().any(|t| t.label == *c))
            .collect();
        if present.len() < 2 {
            return Err(Error::InvalidArgument("blending needs two classes with training data".into()));
        }
        let mut run = BaselineRun::default();
        for (idx, primary) in present.iter().enumerate() {
            let mut rng = rng_for(class_seed(seed, idx), 1);
            let groups = group_examples(&bundle.train_of(primary), self.k, class_seed(seed, idx))?;
            let others: Vec<&str> = present.iter().copied().filter(|c| c != primary).collect();
            for group in groups {
                let secondary = *others.choose(&mut rng).expect("two classes present");
                let pool = bundle.train_of(secondary);
                let sec_examples: Vec<LabeledText> =
                    pool.choose_multiple(&mut rng, self.k.min(pool.len())).cloned().collect();
                let spec = BlendSpec::new(*primary, secondary, self.mix)?;
                run.absorb(blend_augment(&spec, classes, &group, &sec_examples, self.n, &self.gateway)?);
            }
        }
        Ok(AugmentOutput {
            method: self.name().into(),
            shortfall: shortfall(bundle, &run.items, ratio),
            items: run.items,
            failures: run.failures,
            ..AugmentOutput::default()
        })
    }
}

/// Augments from the training split and mixes the result back in.
pub fn augment_and_mix(
    bundle: &CorpusBundle,
    augmenter: &dyn Augmenter,
    ratio: MixRatio,
    seed: u64,
) -> Result<(CorpusBundle, AugmentOutput)> {
    let out = augmenter.augment(bundle, ratio, seed)?;
    let mixed = crate::corpus::mix(bundle, &out.items, ratio, seed)?;
    Ok((mixed, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ClassSet, ClassSpec};

    fn bundle() -> CorpusBundle {
        let classes = ClassSet::new(vec![
            ClassSpec::new("Teasing", "t", "humorous", ["banter"]).unwrap(),
            ClassSpec::new("Criticism", "c", "constructive", ["facts"]).unwrap(),
        ])
        .unwrap();
        let train = (0..6)
            .flat_map(|i| {
                [
                    LabeledText::original(format!("nice hat good buddy {i}"), "Teasing"),
                    LabeledText::original(format!("the product is bad {i}"), "Criticism"),
                ]
            })
            .collect();
        let test = vec![LabeledText::original("held out", "Teasing")];
        CorpusBundle::from_splits(classes, train, vec![], test, 0).unwrap()
    }

    #[test]
    fn identity_adds_nothing() {
        let b = bundle();
        let (mixed, out) = augment_and_mix(&b, &Identity, MixRatio::new(1, 1).unwrap(), 0).unwrap();
        assert!(out.items.is_empty());
        assert_eq!(mixed, b);
    }

    #[test]
    fn eda_fills_quota_via_mix() {
        let b = bundle();
        let (mixed, out) = augment_and_mix(&b, &Eda::default(), MixRatio::new(1, 1).unwrap(), 4).unwrap();
        assert_eq!(out.shortfall, 0);
        assert_eq!(mixed.train().len(), 24);
        assert!(mixed.held_out_intact());
    }
}
