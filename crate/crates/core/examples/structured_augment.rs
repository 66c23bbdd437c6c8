// Structured-prompt augmentation of one class with the assertion filter,
// against the synthetic corpus and its mock LLM.
//
//     cargo run --example structured_augment

use promptaug::augment::{augment_class, AugmentParams};
use promptaug::synthetic;

fn main() -> promptaug::Result<()> {
    run_example()
}

pub fn run_example() -> promptaug::Result<()> {
    let bundle = synthetic::bundle(0)?;
    let gateway = synthetic::vocabulary_restoring_gateway();
    let classes = bundle.classes();
    let threats = classes.get("Threats").expect("synthetic class");
    let train = bundle.train_of("Threats");

    let params = AugmentParams { deterministic: true, ..AugmentParams::default() };
    let out = augment_class(threats, &train, 12, &params, &gateway)?;
    let s = &out.stats;
    println!(
        "{} prompts, {} parsed, {} accepted, {} rejected, {} duplicates",
        s.prompts, s.candidates_parsed, s.accepted, s.filter_rejected, s.duplicates
    );
    assert!(s.reconciles());
    for item in out.accepted.iter().take(3) {
        println!("  {}  (from {} examples)", item.text, item.source_ids.len());
    }
    let first = &out.records[0];
    println!("\nfirst prompt:\n{}", first.bundle.rendered);
    Ok(())
}
