// Drive the command line in-process: evaluate the unaugmented baseline and
// the structured-prompt method, then render the comparison report.
//
//     cargo run --example run_report

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}

pub fn run_example() -> promptaug::Result<()> {
    let fixtures = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic");
    let out = std::env::temp_dir().join(format!("promptaug-report-{}", std::process::id()));
    let corpus = format!("{fixtures}/corpus.jsonl");
    let classes = format!("{fixtures}/classes.json");

    for method in ["orig", "promptaug"] {
        let dir = out.join(method).to_string_lossy().into_owned();
        let code = promptaug::runner::main_with_args([
            "promptaug", "eval", "--method", method, "--corpus", &corpus, "--classes", &classes,
            "--llm-mock", "builtin:synthetic", "--ratio", "1:1", "--seeds", "0,1,2", "--out", &dir,
        ]);
        if code != 0 {
            return Err(promptaug::Error::InvalidArgument(format!("eval {method} exited {code}")));
        }
    }
    let code = promptaug::runner::main_with_args(["promptaug", "report", &out.to_string_lossy()]);
    let _ = std::fs::remove_dir_all(&out);
    assert_eq!(code, 0);
    Ok(())
}
