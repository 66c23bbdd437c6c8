// Dist-n and Self-BLEU of EDA output against the original corpus, after
// normalizing both to the same word budget.
//
//     cargo run --example diversity_metrics

use promptaug::corpus::{load_corpus, ClassSet, LabeledText};
use promptaug::diversity::{diversity_report, render_diversity_table, TokenizedCorpus};
use promptaug::pipeline::{Augmenter, Eda};

fn main() -> promptaug::Result<()> {
    run_example()
}

fn tokenized(items: &[LabeledText]) -> TokenizedCorpus {
    TokenizedCorpus::from_texts(items.iter().map(|t| t.text.as_str()))
}

pub fn run_example() -> promptaug::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/mini");
    let classes = ClassSet::load(format!("{dir}/classes.json"))?;
    let data = load_corpus(format!("{dir}/corpus.jsonl"), &classes)?;
    let bundle = promptaug::corpus::CorpusBundle::from_splits(classes, data.clone(), vec![], vec![], 0)?;

    let eda = Eda::default().augment(&bundle, promptaug::corpus::MixRatio::new(1, 1)?, 0)?;
    let orig = tokenized(&data);
    let aug = tokenized(&eda.items);
    let report = diversity_report(&aug, &orig, None, 0)?;
    println!("word budget {}", report.word_budget);
    print!("{}", render_diversity_table(&[("EDA".into(), report)]));
    Ok(())
}
