use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::augment::PromptVariant;
use crate::corpus::{MixRatio, ScarcityConfig};
use crate::error::{Error, Result};

pub const DEFAULT_LLM_URL: &str = "http://localhost:8000/v1/chat/completions";
pub const DEFAULT_LLM_MODEL: &str = "llama-2-7b-chat";
/// `--llm-mock` value selecting the built-in synthetic-corpus mock.
pub const BUILTIN_SYNTHETIC_MOCK: &str = "builtin:synthetic";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Orig,
    Eda,
    Rephrase,
    Blend,
    Promptaug,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Orig,
        Method::Eda,
        Method::Rephrase,
        Method::Blend,
        Method::Promptaug,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Orig => "orig",
            Method::Eda => crate::baselines::method::EDA,
            Method::Rephrase => crate::baselines::method::REPHRASE,
            Method::Blend => crate::baselines::method::BLEND,
            Method::Promptaug => crate::augment::METHOD_NAME,
        }
    }

    /// Row label used in rendered tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Method::Orig => "Orig",
            Method::Eda => "EDA",
            Method::Rephrase => "Rephrase",
            Method::Blend => "Blend",
            Method::Promptaug => "PAug",
        }
    }

    pub fn uses_llm(self) -> bool {
        matches!(self, Method::Rephrase | Method::Blend | Method::Promptaug)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown method {s:?} (expected one of orig, eda, rephrase, blend, promptaug)"
                ))
            })
    }
}

/// Flags shared by the experiment subcommands. Every field is optional so a
/// config file can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// One JSONL corpus to split 80/10/10, or three files (train, validation, test).
    #[arg(long, num_args = 1..=3)]
    pub corpus: Vec<PathBuf>,
    /// Class-spec JSON.
    #[arg(long)]
    pub classes: Option<PathBuf>,
    /// orig | eda | rephrase | blend | promptaug
    #[arg(long)]
    pub method: Option<String>,
    /// full | no_examples | no_definition | no_context
    #[arg(long)]
    pub variant: Option<String>,
    /// Original-to-augmented mixing ratio, e.g. 10:1.
    #[arg(long)]
    pub ratio: Option<String>,
    /// Examples per prompt.
    #[arg(long)]
    pub k: Option<usize>,
    /// Generations requested per prompt.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated seeds; the first drives splitting and augmentation,
    /// each one trains a classifier run.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// Comma-separated training-data fractions for the scarcity sweep.
    #[arg(long, value_delimiter = ',')]
    pub fractions: Vec<f64>,
    /// Word budget for diversity normalization.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub llm_url: Option<String>,
    #[arg(long)]
    pub llm_model: Option<String>,
    /// Mock script JSON, or `builtin:synthetic`.
    #[arg(long)]
    pub llm_mock: Option<String>,
    /// Dispatch prompts one at a time for reproducible runs.
    #[arg(long)]
    pub deterministic: bool,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// On-disk config: the same settings as [`RunArgs`], all optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub corpus: Vec<PathBuf>,
    pub classes: Option<PathBuf>,
    pub method: Option<String>,
    pub variant: Option<String>,
    pub ratio: Option<String>,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub seeds: Vec<u64>,
    pub fractions: Vec<f64>,
    pub budget: Option<usize>,
    pub llm_url: Option<String>,
    pub llm_model: Option<String>,
    pub llm_mock: Option<String>,
    pub deterministic: Option<bool>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    /// Reads a config file; relative paths are taken relative to its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ConfigFile = serde_json::from_str(&raw).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.corpus.iter_mut().for_each(rebase);
        cfg.classes.iter_mut().for_each(rebase);
        cfg.out.iter_mut().for_each(rebase);
        if let Some(mock) = cfg.llm_mock.as_mut() {
            if mock != BUILTIN_SYNTHETIC_MOCK && Path::new(mock.as_str()).is_relative() {
                *mock = base.join(&*mock).to_string_lossy().into_owned();
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmSettings {
    pub url: String,
    pub model: String,
    pub mock: Option<String>,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub corpus: Vec<PathBuf>,
    pub classes: PathBuf,
    pub method: Method,
    pub variant: PromptVariant,
    pub ratio: MixRatio,
    pub k: usize,
    pub n: usize,
    pub seeds: Vec<u64>,
    pub fractions: Vec<f64>,
    pub budget: Option<usize>,
    pub llm: LlmSettings,
    pub deterministic: bool,
    pub out: PathBuf,
}

impl RunConfig {
    /// Merges flag > config file > default and validates everything,
    /// reporting all problems at once.
    pub fn resolve(args: &RunArgs, default_method: Method, default_out: &str) -> Result<Self> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let mut errors = Vec::new();

        let corpus = if args.corpus.is_empty() { file.corpus } else { args.corpus.clone() };
        if corpus.is_empty() {
            errors.push("no corpus given (--corpus)".to_string());
        } else if corpus.len() != 1 && corpus.len() != 3 {
            errors.push(format!("expected 1 or 3 corpus files, got {}", corpus.len()));
        }
        for p in &corpus {
            if !p.is_file() {
                errors.push(format!("corpus file {} does not exist", p.display()));
            }
        }
        let classes = args.classes.clone().or(file.classes);
        match &classes {
            None => errors.push("no class spec given (--classes)".into()),
            Some(p) if !p.is_file() => errors.push(format!("class spec {} does not exist", p.display())),
            _ => {}
        }

        let method = match args.method.clone().or(file.method) {
            None => Some(default_method),
            Some(s) => s.parse::<Method>().map_err(|e| errors.push(e.to_string())).ok(),
        };
        let variant = match args.variant.clone().or(file.variant) {
            None => Some(PromptVariant::Full),
            Some(s) => s.parse::<PromptVariant>().map_err(|e| errors.push(e.to_string())).ok(),
        };
        let ratio = match args.ratio.clone().or(file.ratio) {
            None => Some(MixRatio::new(10, 1).expect("valid default")),
            Some(s) => s.parse::<MixRatio>().map_err(|e| errors.push(e.to_string())).ok(),
        };
        let k = args.k.or(file.k).unwrap_or(3);
        let n = args.n.or(file.n).unwrap_or(5);
        if k == 0 {
            errors.push("k must be at least 1".into());
        }
        if n == 0 {
            errors.push("n must be at least 1".into());
        }
        let seeds = [args.seeds.clone(), file.seeds]
            .into_iter()
            .find(|s| !s.is_empty())
            .unwrap_or_else(|| (0..5).collect());
        let fractions = [args.fractions.clone(), file.fractions]
            .into_iter()
            .find(|f| !f.is_empty())
            .unwrap_or_else(|| ScarcityConfig::default().fractions);
        if let Err(e) = ScarcityConfig::new(fractions.clone(), 0) {
            errors.push(e.to_string());
        }
        let budget = args.budget.or(file.budget);
        if budget == Some(0) {
            errors.push("budget must be positive".into());
        }
        let mock = args.llm_mock.clone().or(file.llm_mock);
        if let Some(m) = &mock {
            if m != BUILTIN_SYNTHETIC_MOCK && !Path::new(m).is_file() {
                errors.push(format!("mock script {m} does not exist"));
            }
        }

        if !errors.is_empty() {
            return Err(Error::Config(errors));
        }
        Ok(RunConfig {
            corpus,
            classes: classes.expect("checked"),
            method: method.expect("checked"),
            variant: variant.expect("checked"),
            ratio: ratio.expect("checked"),
            k,
            n,
            seeds,
            fractions,
            budget,
            llm: LlmSettings {
                url: args.llm_url.clone().or(file.llm_url).unwrap_or_else(|| DEFAULT_LLM_URL.into()),
                model: args.llm_model.clone().or(file.llm_model).unwrap_or_else(|| DEFAULT_LLM_MODEL.into()),
                mock,
            },
            deterministic: args.deterministic || file.deterministic.unwrap_or(false),
            out: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from(default_out)),
        })
    }

    /// Seed for splitting and augmentation.
    pub fn seed(&self) -> u64 {
        self.seeds[0]
    }
}
