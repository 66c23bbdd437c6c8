use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::augment::{AugmentStats, GenerationRecord, PromptVariant};
use crate::corpus::SplitFingerprints;
use crate::diversity::DiversityReport;
use crate::error::{Error, Result};
use crate::eval::{Agreement, EvalRun, FractionSummary};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Per-seed metrics of one classifier configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub seeds: Vec<u64>,
    pub train_size: usize,
    pub test_size: usize,
    pub accuracy: Vec<f64>,
    pub macro_f1: Vec<f64>,
    pub macro_recall: Vec<f64>,
    pub macro_precision: Vec<f64>,
}

impl EvalSummary {
    pub fn from_runs(runs: &[EvalRun], train_size: usize) -> Self {
        let col = |f: fn(&EvalRun) -> f64| runs.iter().map(f).collect();
        EvalSummary {
            seeds: runs.iter().map(|r| r.seed).collect(),
            train_size,
            test_size: runs.first().map_or(0, EvalRun::total),
            accuracy: col(|r| r.accuracy),
            macro_f1: col(|r| r.macro_f1),
            macro_recall: col(|r| r.macro_recall),
            macro_precision: col(|r| r.macro_precision),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunResults {
    Eval(EvalSummary),
    Sweep { summary: Vec<FractionSummary> },
    Diversity(DiversityReport),
    Agreement(Agreement),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<PromptVariant>,
    /// Set to "ablate" on the per-variant runs of an ablation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splits: Option<SplitFingerprints>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<AugmentStats>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub per_class: BTreeMap<String, AugmentStats>,
    pub augmented_items: usize,
    pub shortfall: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    /// File name → SHA-256 of its contents (timing fields excluded).
    pub outputs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub results: Option<RunResults>,
}

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

impl RunManifest {
    pub fn new(command: &str, started_unix_ms: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            started_unix_ms,
            finished_unix_ms: started_unix_ms,
            config: None,
            method: None,
            variant: None,
            experiment: None,
            splits: None,
            counts: None,
            per_class: BTreeMap::new(),
            augmented_items: 0,
            shortfall: 0,
            failures: Vec::new(),
            outputs: BTreeMap::new(),
            results: None,
        }
    }

    /// parsed = accepted + rejected + duplicates, overall and per class.
    pub fn reconciles(&self) -> bool {
        self.counts.as_ref().is_none_or(AugmentStats::reconciles)
            && self.per_class.values().all(AugmentStats::reconciles)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let raw = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let manifest: RunManifest = serde_json::from_str(&raw).map_err(|e| Error::Malformed {
            path: path.clone(),
            line: e.line(),
            message: format!("corrupt manifest: {e}"),
        })?;
        if !manifest.reconciles() {
            return Err(Error::Malformed {
                path,
                line: 0,
                message: "corrupt manifest: stage counts do not reconcile".into(),
            });
        }
        Ok(manifest)
    }

    pub fn write(&mut self, dir: &Path) -> Result<PathBuf> {
        self.finished_unix_ms = now_ms();
        let mut body = serde_json::to_string_pretty(self)?;
        body.push('\n');
        let path = dir.join(MANIFEST_FILE);
        atomic_write(&path, body.as_bytes())?;
        Ok(path)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Writes an output file and records its digest in the manifest.
pub fn write_output(manifest: &mut RunManifest, dir: &Path, name: &str, body: &str) -> Result<()> {
    atomic_write(&dir.join(name), body.as_bytes())?;
    manifest.outputs.insert(name.to_string(), sha256_hex(body.as_bytes()));
    Ok(())
}

/// One JSON record per line. With `zero_timing` latencies are written as 0,
/// which is the form digested into the manifest.
pub fn generation_log(records: &[GenerationRecord], zero_timing: bool) -> Result<String> {
    let mut out = String::new();
    for r in records {
        let line = if zero_timing {
            let mut r = r.clone();
            if let Some(raw) = r.raw.as_mut() {
                raw.latency = std::time::Duration::ZERO;
            }
            serde_json::to_string(&r)?
        } else {
            serde_json::to_string(r)?
        };
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// Writes the generation log and digests it without timing fields.
pub fn write_generation_log(manifest: &mut RunManifest, dir: &Path, name: &str, records: &[GenerationRecord]) -> Result<()> {
    let body = generation_log(records, false)?;
    atomic_write(&dir.join(name), body.as_bytes())?;
    let digest_form = generation_log(records, true)?;
    manifest.outputs.insert(name.to_string(), sha256_hex(digest_form.as_bytes()));
    Ok(())
}
