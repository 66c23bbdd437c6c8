// Render the generation prompt for each ablation variant.
//
//     cargo run --example prompt_variants

use promptaug::augment::{build_prompt, PromptVariant};
use promptaug::corpus::{load_corpus, ClassSet};

fn main() -> promptaug::Result<()> {
    run_example()
}

pub fn run_example() -> promptaug::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/sarcasm");
    let classes = ClassSet::load(format!("{dir}/classes.json"))?;
    let examples = load_corpus(format!("{dir}/examples.jsonl"), &classes)?;
    let sarcasm = classes.get("Sarcasm").expect("fixture class");

    for variant in PromptVariant::ALL {
        let shown = if variant.uses_examples() { &examples[..] } else { &[] };
        let bundle = build_prompt(sarcasm, shown, 5, variant)?;
        println!("== {} ==\n{}\n", variant.display_name(), bundle.rendered);
    }
    Ok(())
}
