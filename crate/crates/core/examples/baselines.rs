// EDA, rephrasing and boundary blending on the small two-class fixture.
//
//     cargo run --example baselines

use promptaug::corpus::{load_corpus, stratified_split, ClassSet, MixRatio, SplitRatios};
use promptaug::llm::{Gateway, MockScript};
use promptaug::pipeline::{Augmenter, Blend, Eda, Rephrase};

fn main() -> promptaug::Result<()> {
    run_example()
}

pub fn run_example() -> promptaug::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/mini");
    let classes = ClassSet::load(format!("{dir}/classes.json"))?;
    let bundle = stratified_split(&load_corpus(format!("{dir}/corpus.jsonl"), &classes)?, &classes, SplitRatios::default(), 0)?;
    let mock = || -> promptaug::Result<Gateway> { Ok(Gateway::mock(MockScript::load(format!("{dir}/mock.json"))?)) };

    let augmenters: Vec<Box<dyn Augmenter>> = vec![
        Box::new(Eda::default()),
        Box::new(Rephrase { gateway: mock()?, n: 5 }),
        Box::new(Blend { gateway: mock()?, k: 3, n: 5, mix: 0.75 }),
    ];
    let ratio = MixRatio::new(1, 1)?;
    for a in &augmenters {
        let out = a.augment(&bundle, ratio, 1)?;
        println!("{:<9} {:>3} items, shortfall {}", a.name(), out.items.len(), out.shortfall);
        if let Some(x) = out.items.first() {
            println!("          e.g. [{}] {}", x.label, x.text);
        }
    }
    Ok(())
}
