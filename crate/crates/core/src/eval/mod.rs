//! Extrinsic evaluation: a hashed-feature linear classifier, classification
//! metrics, the scarcity sweep, and the statistics used to compare runs.

mod metrics;
mod model;
mod stats;
mod sweep;

pub use metrics::{evaluate, ClassMetrics, EvalRun};
pub use model::{featurize, train, LinearTextModel, TrainParams};
pub use stats::{
    agreement, kappa_band, mean_sd, paired_t_test, student_t_two_sided, Agreement,
    SignificanceResult, DEFAULT_THRESHOLD,
};
pub use sweep::{scarcity_sweep, FractionSummary, MeanSd, SweepConfig, SweepRow, SweepTable};
