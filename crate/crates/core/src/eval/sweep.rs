use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{evaluate, EvalRun};
use super::model::{train, TrainParams};
use super::stats::{mean_sd, paired_t_test, SignificanceResult, DEFAULT_THRESHOLD};
use crate::corpus::{subsample_train, CorpusBundle, MixRatio, ScarcityConfig};
use crate::error::{Error, Result};
use crate::pipeline::{augment_and_mix, Augmenter};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub scarcity: ScarcityConfig,
    pub ratio: MixRatio,
    /// One training run per seed and arm; five seeds give the 4 degrees of
    /// freedom of the default protocol.
    pub seeds: Vec<u64>,
    /// Hyperparameters; the seed is taken from `seeds`.
    pub train: TrainParams,
    pub threshold: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            scarcity: ScarcityConfig::default(),
            ratio: MixRatio::new(10, 1).expect("valid ratio"),
            seeds: (0..5).collect(),
            train: TrainParams::default(),
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

/// One training run in long form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub fraction: f64,
    pub method: String,
    pub seed: u64,
    pub train_size: usize,
    pub eval: EvalRun,
}

/// Mean and sample standard deviation over runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    fn of(values: &[f64]) -> Self {
        let (mean, sd) = mean_sd(values);
        MeanSd { mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionSummary {
    pub fraction: f64,
    pub method: String,
    pub baseline_train_size: usize,
    pub augmented_train_size: usize,
    pub augment_shortfall: usize,
    pub baseline_accuracy: MeanSd,
    pub augmented_accuracy: MeanSd,
    pub baseline_f1: MeanSd,
    pub augmented_f1: MeanSd,
    /// Paired test of augmented vs baseline accuracy; absent for a single run.
    pub accuracy_test: Option<SignificanceResult>,
    pub f1_test: Option<SignificanceResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<FractionSummary>,
}

fn train_eval_runs(bundle: &CorpusBundle, config: &SweepConfig) -> Result<Vec<EvalRun>> {
    config
        .seeds
        .par_iter()
        .map(|&seed| {
            let model = train(bundle, config.train.with_seed(seed))?;
            evaluate(&model, bundle.test())
        })
        .collect()
}

/// Runs the scarcity protocol: for each fraction, subsample the training
/// split, augment from that subsample only, mix, then train and evaluate
/// both arms once per seed and pair them by seed.
pub fn scarcity_sweep(bundle: &CorpusBundle, augmenter: &dyn Augmenter, config: &SweepConfig) -> Result<SweepTable> {
    config.scarcity.validate()?;
    if config.seeds.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one training seed".into()));
    }
    if bundle.test().is_empty() {
        return Err(Error::InvalidArgument("sweep needs a non-empty test split".into()));
    }
    let seed = config.scarcity.seed;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &fraction in &config.scarcity.fractions {
        let sub = subsample_train(bundle, fraction, seed)?;
        let (mixed, out) = augment_and_mix(&sub, augmenter, config.ratio, seed)?;
        let base = train_eval_runs(&sub, config)?;
        let aug = train_eval_runs(&mixed, config)?;
        let pick = |runs: &[EvalRun], f: fn(&EvalRun) -> f64| runs.iter().map(f).collect::<Vec<_>>();
        let (ba, aa) = (pick(&base, |e| e.accuracy), pick(&aug, |e| e.accuracy));
        let (bf, af) = (pick(&base, |e| e.macro_f1), pick(&aug, |e| e.macro_f1));
        let test = |a: &[f64], b: &[f64]| {
            (config.seeds.len() >= 2)
                .then(|| paired_t_test(a, b, config.threshold))
                .transpose()
        };
        summary.push(FractionSummary {
            fraction,
            method: augmenter.name().to_string(),
            baseline_train_size: sub.train().len(),
            augmented_train_size: mixed.train().len(),
            augment_shortfall: out.shortfall,
            baseline_accuracy: MeanSd::of(&ba),
            augmented_accuracy: MeanSd::of(&aa),
            baseline_f1: MeanSd::of(&bf),
            augmented_f1: MeanSd::of(&af),
            accuracy_test: test(&aa, &ba)?,
            f1_test: test(&af, &bf)?,
        });
        for (method, size, runs) in [
            ("orig", sub.train().len(), base),
            (augmenter.name(), mixed.train().len(), aug),
        ] {
            rows.extend(runs.into_iter().map(|eval| SweepRow {
                fraction,
                method: method.to_string(),
                seed: eval.seed,
                train_size: size,
                eval,
            }));
        }
    }
    Ok(SweepTable { rows, summary })
}

impl SweepTable {
    /// One line per fraction: sizes, mean ± sample sd, and the paired test.
    pub fn render(&self) -> String {
        let mut out = String::from(
            "fraction  method      n_orig  n_aug  acc_orig (sd)    acc_aug (sd)     f1_orig (sd)     f1_aug (sd)      t      p\n",
        );
        for s in &self.summary {
            let ms = |m: MeanSd| format!("{:.3} ({:.3})", m.mean, m.sd);
            let (t, p) = match &s.accuracy_test {
                Some(r) => (format!("{:.2}", r.t_value), format!("{:.3}", r.p_value)),
                None => ("-".into(), "-".into()),
            };
            let _ = writeln!(
                out,
                "{:<8.2}  {:<10}  {:>6}  {:>5}  {:<15}  {:<15}  {:<15}  {:<15}  {:>5}  {:>5}",
                s.fraction,
                s.method,
                s.baseline_train_size,
                s.augmented_train_size,
                ms(s.baseline_accuracy),
                ms(s.augmented_accuracy),
                ms(s.baseline_f1),
                ms(s.augmented_f1),
                t,
                p
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::Identity;
    use crate::synthetic;

    #[test]
    fn identity_sweep_is_null() {
        let bundle = synthetic::bundle(0).unwrap();
        let config = SweepConfig {
            scarcity: ScarcityConfig::new(vec![0.2, 0.6, 1.0], 3).unwrap(),
            ratio: MixRatio::new(1, 1).unwrap(),
            seeds: vec![0, 1],
            train: TrainParams {
                dim: 1 << 14,
                epochs: 3,
                ..TrainParams::default()
            },
            threshold: 0.05,
        };
        let table = scarcity_sweep(&bundle, &Identity, &config).unwrap();
        assert_eq!(table.summary.len(), 3);
        assert_eq!(table.rows.len(), 12);
        for s in &table.summary {
            let t = s.accuracy_test.as_ref().unwrap();
            assert_eq!((t.p_value, t.significant), (1.0, false));
            assert_eq!(s.baseline_accuracy, s.augmented_accuracy);
        }
        let sizes: Vec<usize> = table.summary.iter().map(|s| s.baseline_train_size).collect();
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
        assert!(table.render().lines().count() == 4);
    }
}
