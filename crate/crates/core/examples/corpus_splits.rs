// Load a corpus, split it per class, shrink the training split and mix in
// augmented items at a fixed ratio.
//
//     cargo run --example corpus_splits

use promptaug::corpus::{load_corpus, mix, stratified_split, subsample_train, ClassSet, LabeledText, MixRatio, SplitRatios};

fn main() -> promptaug::Result<()> {
    run_example()
}

pub fn run_example() -> promptaug::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/mini");
    let classes = ClassSet::load(format!("{dir}/classes.json"))?;
    let data = load_corpus(format!("{dir}/corpus.jsonl"), &classes)?;

    let bundle = stratified_split(&data, &classes, SplitRatios::default(), 7)?;
    println!(
        "train {} / validation {} / test {}",
        bundle.train().len(),
        bundle.validation().len(),
        bundle.test().len()
    );
    println!("test fingerprint {}", &bundle.fingerprints().test[..16]);

    let scarce = subsample_train(&bundle, 0.5, 7)?;
    println!("half the training data: {} items", scarce.train().len());

    // ten augmented items per class, but 10:1 only admits ceil(n/10)
    let source = scarce.train()[0].id.clone();
    let extra: Vec<LabeledText> = classes
        .names()
        .into_iter()
        .flat_map(|c| (0..10).map(move |i| (c, i)))
        .map(|(c, i)| LabeledText::augmented(format!("{c} variant {i}"), c, "demo", vec![source.clone()]))
        .collect();
    let mixed = mix(&scarce, &extra, MixRatio::new(10, 1)?, 7)?;
    println!("after 10:1 mixing: {} items", mixed.train().len());
    assert!(mixed.held_out_intact());

    // an item derived from a test datapoint is refused
    let leak = LabeledText::augmented("leak", bundle.test()[0].label.clone(), "demo", vec![bundle.test()[0].id.clone()]);
    let err = mix(&scarce, &[leak], MixRatio::new(1, 1)?, 7).unwrap_err();
    println!("rejected: {err}");
    Ok(())
}
