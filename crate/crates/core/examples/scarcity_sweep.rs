// Train the hashed-feature classifier at several training-data fractions,
// with and without mock augmentation.
//
//     cargo run --release --example scarcity_sweep

use promptaug::corpus::{MixRatio, ScarcityConfig};
use promptaug::eval::{evaluate, scarcity_sweep, train, SweepConfig, TrainParams};
use promptaug::pipeline::PromptAug;
use promptaug::synthetic;

fn main() -> promptaug::Result<()> {
    run_example()
}

pub fn run_example() -> promptaug::Result<()> {
    let bundle = synthetic::bundle(0)?;
    let full = evaluate(&train(&bundle, TrainParams::default())?, bundle.test())?;
    println!("full data: accuracy {:.3}, macro F1 {:.3}\n", full.accuracy, full.macro_f1);

    let augmenter = PromptAug { gateway: synthetic::vocabulary_restoring_gateway(), params: Default::default() };
    let config = SweepConfig {
        scarcity: ScarcityConfig::new(vec![0.1, 0.2, 0.5, 1.0], 0)?,
        ratio: MixRatio::new(1, 1)?,
        seeds: vec![0, 1, 2],
        ..SweepConfig::default()
    };
    print!("{}", scarcity_sweep(&bundle, &augmenter, &config)?.render());
    Ok(())
}
