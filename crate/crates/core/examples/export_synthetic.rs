// Writes the separable six-class synthetic corpus and its class specs.
//
//     cargo run --example export_synthetic -- [out_dir] [seed]
//
// The default output is the bundled fixture directory.

use std::path::PathBuf;

use promptaug::corpus::to_jsonl;
use promptaug::synthetic;

fn main() -> promptaug::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/synthetic"));
    let seed: u64 = args.next().map(|s| s.parse().expect("seed must be an integer")).unwrap_or(0);
    export(&dir, seed)
}

pub fn run_example() -> promptaug::Result<()> {
    let dir = std::env::temp_dir().join(format!("promptaug-export-{}", std::process::id()));
    export(&dir, 0)?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

fn export(dir: &std::path::Path, seed: u64) -> promptaug::Result<()> {
    let corpus = synthetic::corpus(seed);
    let classes = serde_json::to_string_pretty(&synthetic::classes())? + "\n";
    promptaug::runner::atomic_write(&dir.join("corpus.jsonl"), to_jsonl(&corpus).as_bytes())?;
    promptaug::runner::atomic_write(&dir.join("classes.json"), classes.as_bytes())?;
    println!("wrote {} datapoints to {}", corpus.len(), dir.display());
    Ok(())
}
