use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::Method;
use super::manifest::{EvalSummary, RunManifest, RunResults, MANIFEST_FILE};
use crate::augment::PromptVariant;
use crate::diversity::render_diversity_table;
use crate::error::{Error, Result};
use crate::eval::{mean_sd, paired_t_test, SignificanceResult, SweepTable, DEFAULT_THRESHOLD};

/// Finds manifests in each directory and, recursively, its subdirectories.
pub fn collect_manifests(dirs: &[PathBuf]) -> Result<Vec<(PathBuf, RunManifest)>> {
    fn walk(dir: &Path, found: &mut Vec<(PathBuf, RunManifest)>) -> Result<()> {
        if dir.join(MANIFEST_FILE).is_file() {
            found.push((dir.to_path_buf(), RunManifest::load(dir)?));
        }
        let mut subdirs: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_dir())
            .collect();
        subdirs.sort();
        subdirs.iter().try_for_each(|sub| walk(sub, found))
    }
    let mut found = Vec::new();
    for dir in dirs {
        walk(dir, &mut found)?;
    }
    if found.is_empty() {
        return Err(Error::InvalidArgument("no manifest.json found in the given directories".into()));
    }
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub label: String,
    pub source: PathBuf,
    pub runs: usize,
    pub accuracy: (f64, f64),
    pub macro_f1: (f64, f64),
    pub macro_recall: (f64, f64),
    pub macro_precision: (f64, f64),
    /// Paired test of this row's accuracy against the Orig row.
    pub vs_orig: Option<SignificanceResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AugmentRow {
    pub label: String,
    pub source: PathBuf,
    pub prompts: usize,
    pub parsed: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub duplicates: usize,
    pub refusals: usize,
    pub items: usize,
    pub shortfall: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub classification: Vec<MetricRow>,
    pub ablation: Vec<MetricRow>,
    pub augmentation: Vec<AugmentRow>,
    pub sweeps: Vec<(String, SweepTable)>,
    pub diversity: Vec<(String, crate::diversity::DiversityReport)>,
    pub agreement: Vec<(String, crate::eval::Agreement)>,
}

fn method_of(m: &RunManifest) -> Option<Method> {
    m.method.as_deref().and_then(|s| s.parse().ok())
}

fn label_of(m: &RunManifest, dir: &Path) -> String {
    if let (Some("ablate"), Some(v)) = (m.experiment.as_deref(), m.variant) {
        return v.display_name().to_string();
    }
    match (method_of(m), &m.method) {
        (Some(method), _) => method.display_name().to_string(),
        (None, Some(raw)) => raw.clone(),
        (None, None) => dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
    }
}

fn metric_row(label: String, source: &Path, s: &EvalSummary) -> MetricRow {
    let ms = |v: &[f64]| mean_sd(v);
    MetricRow {
        label,
        source: source.to_path_buf(),
        runs: s.seeds.len(),
        accuracy: ms(&s.accuracy),
        macro_f1: ms(&s.macro_f1),
        macro_recall: ms(&s.macro_recall),
        macro_precision: ms(&s.macro_precision),
        vs_orig: None,
    }
}

/// Builds every table the manifests support, in a fixed order.
pub fn build_report(manifests: &[(PathBuf, RunManifest)]) -> Result<Report> {
    let mut report = Report::default();
    let mut classification: Vec<(Option<Method>, MetricRow, &EvalSummary)> = Vec::new();
    let mut ablation: Vec<(usize, MetricRow)> = Vec::new();
    for (dir, m) in manifests {
        let label = label_of(m, dir);
        match &m.results {
            Some(RunResults::Eval(s)) if m.experiment.as_deref() == Some("ablate") => {
                let variant = m.variant.unwrap_or(PromptVariant::Full);
                let pos = PromptVariant::ALL.iter().position(|v| *v == variant).unwrap_or(0);
                ablation.push((pos, metric_row(variant.display_name().to_string(), dir, s)));
            }
            Some(RunResults::Eval(s)) => classification.push((method_of(m), metric_row(label.clone(), dir, s), s)),
            Some(RunResults::Sweep { summary }) => report.sweeps.push((
                label.clone(),
                SweepTable {
                    rows: Vec::new(),
                    summary: summary.clone(),
                },
            )),
            Some(RunResults::Diversity(d)) => report.diversity.push((label.clone(), d.clone())),
            Some(RunResults::Agreement(a)) => report.agreement.push((label.clone(), a.clone())),
            None => {}
        }
        if let Some(c) = &m.counts {
            report.augmentation.push(AugmentRow {
                label: label.clone(),
                source: dir.clone(),
                prompts: c.prompts,
                parsed: c.candidates_parsed,
                accepted: c.accepted,
                rejected: c.filter_rejected,
                duplicates: c.duplicates,
                refusals: c.refusals,
                items: m.augmented_items,
                shortfall: m.shortfall,
            });
        }
    }

    // Orig first, then the other methods, each group in path order.
    classification.sort_by(|a, b| (a.0, &a.1.source).cmp(&(b.0, &b.1.source)));
    let orig = classification
        .iter()
        .find(|(m, ..)| *m == Some(Method::Orig))
        .map(|(_, _, s)| (*s).clone());
    let compare = classification.len() >= 2;
    for (method, mut row, s) in classification {
        if let (true, Some(o)) = (compare, &orig) {
            if method != Some(Method::Orig) && o.seeds == s.seeds && s.seeds.len() >= 2 {
                row.vs_orig = Some(paired_t_test(&s.accuracy, &o.accuracy, DEFAULT_THRESHOLD)?);
            }
        }
        report.classification.push(row);
    }
    ablation.sort_by(|a, b| (a.0, &a.1.source).cmp(&(b.0, &b.1.source)));
    report.ablation = ablation.into_iter().map(|(_, r)| r).collect();
    Ok(report)
}

fn cell((mean, sd): (f64, f64), runs: usize) -> String {
    if runs >= 2 {
        format!("{mean:.2} ± {sd:.2}")
    } else {
        format!("{mean:.2}")
    }
}

fn metric_table(rows: &[MetricRow], with_significance: bool) -> String {
    let w = rows.iter().map(|r| r.label.chars().count()).max().unwrap_or(5).max(5);
    let mut out = String::new();
    let _ = write!(out, "{:<w$}  {:>11}  {:>11}  {:>11}  {:>11}", "Model", "Acc", "F1", "R", "P");
    if with_significance {
        let _ = write!(out, "  {:>16}", "t / p vs Orig");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{:<w$}  {:>11}  {:>11}  {:>11}  {:>11}",
            r.label,
            cell(r.accuracy, r.runs),
            cell(r.macro_f1, r.runs),
            cell(r.macro_recall, r.runs),
            cell(r.macro_precision, r.runs)
        );
        if with_significance {
            let sig = match &r.vs_orig {
                Some(t) => format!("{:.2} / {:.3}{}", t.t_value, t.p_value, if t.significant { "*" } else { "" }),
                None => "-".into(),
            };
            let _ = write!(out, "  {sig:>16}");
        }
        out.push('\n');
    }
    out
}

impl Report {
    pub fn render(&self) -> String {
        let mut out = String::new();
        if !self.classification.is_empty() {
            out.push_str("Classification performance (mean ± sample sd over seeds)\n");
            out.push_str(&metric_table(&self.classification, self.classification.len() >= 2));
            out.push('\n');
        }
        if !self.ablation.is_empty() {
            out.push_str("Prompt component ablation\n");
            out.push_str(&metric_table(&self.ablation, false));
            out.push('\n');
        }
        for (label, table) in &self.sweeps {
            let _ = writeln!(out, "Scarcity sweep ({label})");
            out.push_str(&table.render());
            out.push('\n');
        }
        if !self.diversity.is_empty() {
            out.push_str("Diversity\n");
            out.push_str(&render_diversity_table(&self.diversity));
            out.push('\n');
        }
        for (label, a) in &self.agreement {
            let _ = writeln!(
                out,
                "Agreement ({label}): {:.0}% agreement, Cohen's kappa {:.2} ({}), n = {}",
                a.percent * 100.0,
                a.kappa,
                a.band(),
                a.n
            );
        }
        if !self.augmentation.is_empty() {
            out.push_str("Augmentation counts\n");
            let w = self.augmentation.iter().map(|r| r.label.len()).max().unwrap_or(6).max(6);
            let _ = writeln!(
                out,
                "{:<w$}  {:>7}  {:>6}  {:>8}  {:>8}  {:>10}  {:>8}  {:>5}  {:>9}",
                "Method", "prompts", "parsed", "accepted", "rejected", "duplicates", "refusals", "items", "shortfall"
            );
            for r in &self.augmentation {
                let _ = writeln!(
                    out,
                    "{:<w$}  {:>7}  {:>6}  {:>8}  {:>8}  {:>10}  {:>8}  {:>5}  {:>9}",
                    r.label, r.prompts, r.parsed, r.accepted, r.rejected, r.duplicates, r.refusals, r.items, r.shortfall
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_manifest(method: &str, acc: &[f64]) -> RunManifest {
        let mut m = RunManifest::new("eval", 0);
        m.method = Some(method.into());
        m.results = Some(RunResults::Eval(EvalSummary {
            seeds: (0..acc.len() as u64).collect(),
            train_size: 10,
            test_size: 5,
            accuracy: acc.to_vec(),
            macro_f1: acc.to_vec(),
            macro_recall: acc.to_vec(),
            macro_precision: acc.to_vec(),
        }));
        m
    }

    #[test]
    fn orig_and_paug_rows() {
        let ms = vec![
            (PathBuf::from("b"), eval_manifest("promptaug", &[0.72, 0.74, 0.73, 0.75, 0.74])),
            (PathBuf::from("a"), eval_manifest("orig", &[0.70, 0.71, 0.72, 0.72, 0.71])),
        ];
        let r = build_report(&ms).unwrap();
        let labels: Vec<&str> = r.classification.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, ["Orig", "PAug"]);
        assert!(r.classification[1].vs_orig.is_some());
        let text = r.render();
        assert!(text.contains("t / p vs Orig"));
        assert!(text.contains("PAug"));
    }

    #[test]
    fn single_row_has_no_significance() {
        let r = build_report(&[(PathBuf::from("a"), eval_manifest("orig", &[0.7, 0.8]))]).unwrap();
        let text = r.render();
        assert!(!text.contains("vs Orig"));
        assert_eq!(text.lines().filter(|l| l.starts_with("Orig")).count(), 1);
    }

    #[test]
    fn ablation_rows_follow_variant_order() {
        let ms: Vec<(PathBuf, RunManifest)> = PromptVariant::ALL
            .iter()
            .rev()
            .map(|v| {
                let mut m = eval_manifest("promptaug", &[0.7, 0.7]);
                m.experiment = Some("ablate".into());
                m.variant = Some(*v);
                (PathBuf::from(v.as_str()), m)
            })
            .collect();
        let r = build_report(&ms).unwrap();
        let labels: Vec<&str> = r.ablation.iter().map(|r| r.label.as_str()).collect();
        assert_eq!(labels, PromptVariant::ALL.map(|v| v.display_name()));
        assert!(r.render().contains("PromptAug No Examples"));
    }
}
