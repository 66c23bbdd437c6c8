//! The `promptaug` command line: one subcommand per experiment, JSON
//! manifests next to every output, and a report renderer over run folders.
//!
//! Exit status is 0 on success, 2 when augmentation fell short of its
//! target, and 1 on any fatal error.

mod config;
mod manifest;
mod report;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

pub use config::{
    ConfigFile, LlmSettings, Method, RunArgs, RunConfig, BUILTIN_SYNTHETIC_MOCK, DEFAULT_LLM_MODEL,
    DEFAULT_LLM_URL,
};
pub use manifest::{
    atomic_write, generation_log, sha256_hex, EvalSummary, RunManifest, RunResults, MANIFEST_FILE,
    TOOL_VERSION,
};
pub use report::{build_report, collect_manifests, AugmentRow, MetricRow, Report};

use crate::augment::{AugmentParams, PromptVariant};
use crate::corpus::{
    load_corpus, mix, stratified_split, to_jsonl, ClassSet, CorpusBundle, ScarcityConfig, SplitRatios,
};
use crate::diversity::{diversity_report, render_diversity_table, TokenizedCorpus};
use crate::error::{Error, Result};
use crate::eval::{agreement, evaluate, scarcity_sweep, train, EvalRun, SweepConfig, TrainParams};
use crate::llm::{Gateway, HttpBackend, MockScript};
use crate::pipeline::{augment_and_mix, AugmentOutput, Augmenter, Blend, Eda, Identity, PromptAug, Rephrase};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FATAL: i32 = 1;
pub const EXIT_SHORTFALL: i32 = 2;

const LLM_TIMEOUT: Duration = Duration::from_secs(120);

#[derive(Debug, Parser)]
#[command(name = "promptaug", version, about = "Structured-prompt LLM data augmentation and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate filtered augmented data with the structured-prompt method.
    Augment(RunArgs),
    /// Generate data with a baseline method (eda, rephrase, blend).
    Baseline(RunArgs),
    /// Dist-n and Self-BLEU of an augmented corpus against the original.
    Diversity(DiversityArgs),
    /// Augment, mix and train/evaluate the classifier once per seed.
    Eval(RunArgs),
    /// Scarcity sweep over training-data fractions.
    Sweep(RunArgs),
    /// Evaluate all four prompt variants.
    Ablate(RunArgs),
    /// Percent agreement and Cohen's kappa between two annotation files.
    Agreement(AgreementArgs),
    /// Render comparison tables from run directories.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DiversityArgs {
    /// Augmented corpus (JSONL with a "text" field).
    #[arg(long)]
    pub aug: PathBuf,
    /// Original corpus (JSONL with a "text" field).
    #[arg(long)]
    pub orig: PathBuf,
    /// Word budget; defaults to 90% of the smaller corpus.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Row label; defaults to the method recorded in the augmented file.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long, default_value = "runs/diversity")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct AgreementArgs {
    /// First annotator's labels, one per line.
    #[arg(long)]
    pub a: PathBuf,
    /// Second annotator's labels, one per line.
    #[arg(long)]
    pub b: PathBuf,
    /// Row label in reports.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long, default_value = "runs/agreement")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Run directories (each holding a manifest.json, or subdirectories that do).
    #[arg(required = true)]
    pub dirs: Vec<PathBuf>,
    /// Also write report.txt and report.json here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FATAL } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            match &e {
                Error::Config(problems) => {
                    eprintln!("error: invalid configuration");
                    for p in problems {
                        eprintln!("  - {p}");
                    }
                }
                other => eprintln!("error: {other}"),
            }
            EXIT_FATAL
        }
    }
}

pub fn run(command: Command) -> Result<i32> {
    match command {
        Command::Augment(a) => cmd_augment(&RunConfig::resolve(&a, Method::Promptaug, "runs/augment")?),
        Command::Baseline(a) => cmd_baseline(&RunConfig::resolve(&a, Method::Eda, "runs/baseline")?),
        Command::Diversity(a) => cmd_diversity(&a),
        Command::Eval(a) => cmd_eval(&RunConfig::resolve(&a, Method::Orig, "runs/eval")?),
        Command::Sweep(a) => cmd_sweep(&RunConfig::resolve(&a, Method::Promptaug, "runs/sweep")?),
        Command::Ablate(a) => cmd_ablate(&RunConfig::resolve(&a, Method::Promptaug, "runs/ablate")?),
        Command::Agreement(a) => cmd_agreement(&a),
        Command::Report(a) => cmd_report(&a),
    }
}

/// Loads the class set and corpus, splitting a single file 80/10/10.
pub fn load_bundle(cfg: &RunConfig) -> Result<CorpusBundle> {
    let classes = ClassSet::load(&cfg.classes)?;
    match cfg.corpus.as_slice() {
        [one] => stratified_split(&load_corpus(one, &classes)?, &classes, SplitRatios::default(), cfg.seed()),
        [tr, va, te] => CorpusBundle::from_splits(
            classes.clone(),
            load_corpus(tr, &classes)?,
            load_corpus(va, &classes)?,
            load_corpus(te, &classes)?,
            cfg.seed(),
        ),
        other => Err(Error::Config(vec![format!("expected 1 or 3 corpus files, got {}", other.len())])),
    }
}

/// Mock when configured, otherwise the live endpoint (needs the API key).
pub fn build_gateway(llm: &LlmSettings) -> Result<Gateway> {
    match llm.mock.as_deref() {
        Some(BUILTIN_SYNTHETIC_MOCK) => Ok(crate::synthetic::vocabulary_restoring_gateway()),
        Some(path) => Ok(Gateway::mock(MockScript::load(path)?)),
        None => Ok(Gateway::new(HttpBackend::from_env(&llm.url, &llm.model, LLM_TIMEOUT)?)),
    }
}

fn augment_params(cfg: &RunConfig, variant: PromptVariant) -> AugmentParams {
    AugmentParams {
        k: cfg.k,
        n: cfg.n,
        variant,
        seed: cfg.seed(),
        deterministic: cfg.deterministic,
        ..AugmentParams::default()
    }
}

fn make_augmenter(cfg: &RunConfig, method: Method, variant: PromptVariant) -> Result<Box<dyn Augmenter>> {
    let gateway = || build_gateway(&cfg.llm);
    Ok(match method {
        Method::Orig => Box::new(Identity),
        Method::Eda => Box::new(Eda::default()),
        Method::Rephrase => Box::new(Rephrase { gateway: gateway()?, n: cfg.n }),
        Method::Blend => Box::new(Blend {
            gateway: gateway()?,
            k: cfg.k,
            n: cfg.n,
            mix: 0.75,
        }),
        Method::Promptaug => Box::new(PromptAug {
            gateway: gateway()?,
            params: augment_params(cfg, variant),
        }),
    })
}

fn base_manifest(command: &str, started: u64, cfg: &RunConfig, bundle: &CorpusBundle) -> RunManifest {
    let mut m = RunManifest::new(command, started);
    m.config = Some(cfg.clone());
    m.method = Some(cfg.method.to_string());
    m.splits = Some(bundle.fingerprints().clone());
    m
}

/// Records augmentation outputs (items, generation log, counts) into a run folder.
fn record_augmentation(m: &mut RunManifest, dir: &Path, out: &AugmentOutput) -> Result<()> {
    manifest::write_output(m, dir, "augmented.jsonl", &to_jsonl(&out.items))?;
    if !out.records.is_empty() {
        manifest::write_generation_log(m, dir, "generations.jsonl", &out.records)?;
    }
    m.counts = out.stats.clone();
    m.per_class = out.per_class.clone();
    m.augmented_items = out.items.len();
    m.shortfall = out.shortfall;
    m.failures = out.failures.clone();
    Ok(())
}

fn report_progress(cmd: &str, dir: &Path, out: &AugmentOutput) {
    eprintln!(
        "{cmd}: {} augmented items ({}), shortfall {}, written to {}",
        out.items.len(),
        out.method,
        out.shortfall,
        dir.display()
    );
}

fn cmd_augment(cfg: &RunConfig) -> Result<i32> {
    let started = manifest::now_ms();
    if cfg.method != Method::Promptaug {
        return Err(Error::Config(vec![format!(
            "augment runs the promptaug method; use `baseline --method {}` instead",
            cfg.method
        )]));
    }
    let bundle = load_bundle(cfg)?;
    let augmenter = make_augmenter(cfg, Method::Promptaug, cfg.variant)?;
    let out = augmenter.augment(&bundle, cfg.ratio, cfg.seed())?;
    // the contamination guard runs as part of mixing
    mix(&bundle, &out.items, cfg.ratio, cfg.seed())?;
    let mut m = base_manifest("augment", started, cfg, &bundle);
    m.variant = Some(cfg.variant);
    record_augmentation(&mut m, &cfg.out, &out)?;
    m.write(&cfg.out)?;
    report_progress("augment", &cfg.out, &out);
    Ok(if out.shortfall > 0 { EXIT_SHORTFALL } else { EXIT_OK })
}

fn cmd_baseline(cfg: &RunConfig) -> Result<i32> {
    let started = manifest::now_ms();
    if matches!(cfg.method, Method::Orig | Method::Promptaug) {
        return Err(Error::Config(vec![format!(
            "baseline expects --method eda, rephrase or blend, got {}",
            cfg.method
        )]));
    }
    let bundle = load_bundle(cfg)?;
    let augmenter = make_augmenter(cfg, cfg.method, cfg.variant)?;
    let out = augmenter.augment(&bundle, cfg.ratio, cfg.seed())?;
    mix(&bundle, &out.items, cfg.ratio, cfg.seed())?;
    let mut m = base_manifest("baseline", started, cfg, &bundle);
    record_augmentation(&mut m, &cfg.out, &out)?;
    m.write(&cfg.out)?;
    report_progress("baseline", &cfg.out, &out);
    Ok(if out.shortfall > 0 { EXIT_SHORTFALL } else { EXIT_OK })
}

fn train_runs(bundle: &CorpusBundle, seeds: &[u64]) -> Result<Vec<EvalRun>> {
    seeds
        .par_iter()
        .map(|&s| evaluate(&train(bundle, TrainParams::default().with_seed(s))?, bundle.test()))
        .collect()
}

fn eval_text(runs: &[EvalRun]) -> String {
    let mut out = String::new();
    for r in runs {
        out.push_str(&format!(
            "seed {}: acc {:.4}  f1 {:.4}  recall {:.4}  precision {:.4}\n",
            r.seed, r.accuracy, r.macro_f1, r.macro_recall, r.macro_precision
        ));
    }
    if let Some(first) = runs.first() {
        out.push_str(&format!("\nconfusion (seed {})\n", first.seed));
        out.push_str(&first.render_confusion());
    }
    out
}

/// Augments with `method`/`variant`, mixes, trains per seed, and writes one run folder.
fn eval_into(cfg: &RunConfig, method: Method, variant: PromptVariant, dir: &Path, experiment: Option<&str>) -> Result<RunManifest> {
    let started = manifest::now_ms();
    let bundle = load_bundle(cfg)?;
    let augmenter = make_augmenter(cfg, method, variant)?;
    let (mixed, out) = augment_and_mix(&bundle, augmenter.as_ref(), cfg.ratio, cfg.seed())?;
    let runs = train_runs(&mixed, &cfg.seeds)?;

    let mut m = base_manifest("eval", started, cfg, &bundle);
    m.method = Some(method.to_string());
    m.experiment = experiment.map(String::from);
    if method == Method::Promptaug {
        m.variant = Some(variant);
    }
    if method != Method::Orig {
        record_augmentation(&mut m, dir, &out)?;
    }
    let mut body = serde_json::to_string_pretty(&runs)?;
    body.push('\n');
    manifest::write_output(&mut m, dir, "eval.json", &body)?;
    manifest::write_output(&mut m, dir, "eval.txt", &eval_text(&runs))?;
    m.results = Some(RunResults::Eval(EvalSummary::from_runs(&runs, mixed.train().len())));
    m.write(dir)?;
    Ok(m)
}

fn cmd_eval(cfg: &RunConfig) -> Result<i32> {
    let m = eval_into(cfg, cfg.method, cfg.variant, &cfg.out, None)?;
    let report = build_report(&[(cfg.out.clone(), m)])?;
    print!("{}", report.render());
    Ok(EXIT_OK)
}

fn cmd_sweep(cfg: &RunConfig) -> Result<i32> {
    let started = manifest::now_ms();
    let bundle = load_bundle(cfg)?;
    let augmenter = make_augmenter(cfg, cfg.method, cfg.variant)?;
    let sweep = SweepConfig {
        scarcity: ScarcityConfig::new(cfg.fractions.clone(), cfg.seed())?,
        ratio: cfg.ratio,
        seeds: cfg.seeds.clone(),
        ..SweepConfig::default()
    };
    let table = scarcity_sweep(&bundle, augmenter.as_ref(), &sweep)?;
    let mut m = base_manifest("sweep", started, cfg, &bundle);
    let mut body = serde_json::to_string_pretty(&table)?;
    body.push('\n');
    manifest::write_output(&mut m, &cfg.out, "sweep.json", &body)?;
    let text = table.render();
    manifest::write_output(&mut m, &cfg.out, "sweep.txt", &text)?;
    m.shortfall = table.summary.iter().map(|s| s.augment_shortfall).sum();
    m.results = Some(RunResults::Sweep {
        summary: table.summary.clone(),
    });
    m.write(&cfg.out)?;
    print!("{text}");
    Ok(EXIT_OK)
}

fn cmd_ablate(cfg: &RunConfig) -> Result<i32> {
    let mut manifests = Vec::new();
    for variant in PromptVariant::ALL {
        let dir = cfg.out.join(variant.as_str());
        let m = eval_into(cfg, Method::Promptaug, variant, &dir, Some("ablate"))?;
        manifests.push((dir, m));
    }
    let text = build_report(&manifests)?.render();
    atomic_write(&cfg.out.join("ablation.txt"), text.as_bytes())?;
    print!("{text}");
    Ok(EXIT_OK)
}

fn read_texts(path: &Path) -> Result<(Vec<String>, Option<String>)> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut texts = Vec::new();
    let mut method = None;
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(line).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        let text = value.get("text").and_then(|t| t.as_str()).ok_or_else(|| Error::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            message: "missing \"text\" field".into(),
        })?;
        if method.is_none() {
            method = value.get("method").and_then(|m| m.as_str()).map(String::from);
        }
        texts.push(text.to_string());
    }
    Ok((texts, method))
}

fn cmd_diversity(args: &DiversityArgs) -> Result<i32> {
    let started = manifest::now_ms();
    let (aug, method) = read_texts(&args.aug)?;
    let (orig, _) = read_texts(&args.orig)?;
    let aug = TokenizedCorpus::from_texts(aug.iter().map(String::as_str));
    let orig = TokenizedCorpus::from_texts(orig.iter().map(String::as_str));
    let report = diversity_report(&aug, &orig, args.budget, args.seed)?;
    let label = args.method.clone().or(method).unwrap_or_else(|| "aug".into());

    let mut m = RunManifest::new("diversity", started);
    m.method = Some(label.clone());
    let mut body = serde_json::to_string_pretty(&report)?;
    body.push('\n');
    manifest::write_output(&mut m, &args.out, "diversity.json", &body)?;
    let row_label = label.parse::<Method>().map(|x| x.display_name().to_string()).unwrap_or(label);
    let text = render_diversity_table(&[(row_label, report.clone())]);
    manifest::write_output(&mut m, &args.out, "diversity.txt", &text)?;
    m.results = Some(RunResults::Diversity(report));
    m.write(&args.out)?;
    print!("{text}");
    Ok(EXIT_OK)
}

fn read_labels(path: &Path) -> Result<Vec<String>> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(raw.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

fn cmd_agreement(args: &AgreementArgs) -> Result<i32> {
    let started = manifest::now_ms();
    let result = agreement(&read_labels(&args.a)?, &read_labels(&args.b)?)?;
    let mut m = RunManifest::new("agreement", started);
    m.method = args.method.clone();
    let mut body = serde_json::to_string_pretty(&result)?;
    body.push('\n');
    manifest::write_output(&mut m, &args.out, "agreement.json", &body)?;
    m.results = Some(RunResults::Agreement(result.clone()));
    m.write(&args.out)?;
    println!(
        "{:.0}% agreement, Cohen's kappa {:.2} ({}), n = {}",
        result.percent * 100.0,
        result.kappa,
        result.band(),
        result.n
    );
    Ok(EXIT_OK)
}

fn cmd_report(args: &ReportArgs) -> Result<i32> {
    let manifests = collect_manifests(&args.dirs)?;
    let report = build_report(&manifests)?;
    let text = report.render();
    if let Some(out) = &args.out {
        atomic_write(&out.join("report.txt"), text.as_bytes())?;
        let mut json = serde_json::to_string_pretty(&report)?;
        json.push('\n');
        atomic_write(&out.join("report.json"), json.as_bytes())?;
    }
    print!("{text}");
    Ok(EXIT_OK)
}
