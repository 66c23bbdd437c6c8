use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::model::LinearTextModel;
use crate::corpus::LabeledText;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRun {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub macro_recall: f64,
    pub macro_precision: f64,
    pub per_class: Vec<ClassMetrics>,
    pub labels: Vec<String>,
    /// `confusion[gold][predicted]`
    pub confusion: Vec<Vec<usize>>,
    pub seed: u64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl EvalRun {
    /// Derives every metric from a square confusion matrix (0/0 counts as 0).
    pub fn from_confusion(labels: Vec<String>, confusion: Vec<Vec<usize>>, seed: u64) -> Result<Self> {
        let l = labels.len();
        if l == 0 || confusion.len() != l || confusion.iter().any(|r| r.len() != l) {
            return Err(Error::Stats("confusion matrix must be square over the labels".into()));
        }
        let total: usize = confusion.iter().flatten().sum();
        if total == 0 {
            return Err(Error::Stats("confusion matrix is empty".into()));
        }
        let trace: usize = (0..l).map(|i| confusion[i][i]).sum();
        let per_class: Vec<ClassMetrics> = (0..l)
            .map(|c| {
                let tp = confusion[c][c];
                let support: usize = confusion[c].iter().sum();
                let predicted: usize = confusion.iter().map(|r| r[c]).sum();
                let precision = ratio(tp, predicted);
                let recall = ratio(tp, support);
                let f1 = if precision + recall == 0.0 {
                    0.0
                } else {
                    2.0 * precision * recall / (precision + recall)
                };
                ClassMetrics {
                    label: labels[c].clone(),
                    precision,
                    recall,
                    f1,
                    support,
                }
            })
            .collect();
        let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / l as f64;
        Ok(EvalRun {
            accuracy: ratio(trace, total),
            macro_f1: mean(|m| m.f1),
            macro_recall: mean(|m| m.recall),
            macro_precision: mean(|m| m.precision),
            per_class,
            labels,
            confusion,
            seed,
        })
    }

    pub fn total(&self) -> usize {
        self.confusion.iter().flatten().sum()
    }

    /// Counts and row-normalized shares, one row per gold label.
    pub fn render_confusion(&self) -> String {
        let w = self.labels.iter().map(String::len).max().unwrap_or(4).max(4);
        let mut out = String::new();
        for normalized in [false, true] {
            let _ = write!(out, "{:<w$}", if normalized { "row %" } else { "count" });
            for l in &self.labels {
                let _ = write!(out, "  {l:>w$}");
            }
            out.push('\n');
            for (gold, row) in self.labels.iter().zip(&self.confusion) {
                let support: usize = row.iter().sum();
                let _ = write!(out, "{gold:<w$}");
                for &c in row {
                    if normalized {
                        let _ = write!(out, "  {:>w$.2}", ratio(c, support));
                    } else {
                        let _ = write!(out, "  {c:>w$}");
                    }
                }
                out.push('\n');
            }
            if !normalized {
                out.push('\n');
            }
        }
        out
    }
}

/// Scores a model on labelled test items.
pub fn evaluate(model: &LinearTextModel, test: &[LabeledText]) -> Result<EvalRun> {
    if test.is_empty() {
        return Err(Error::Stats("test split is empty".into()));
    }
    let labels: Vec<String> = model.labels().to_vec();
    let l = labels.len();
    let mut confusion = vec![vec![0usize; l]; l];
    for item in test {
        let gold = labels
            .iter()
            .position(|x| *x == item.label)
            .ok_or_else(|| Error::UnknownLabel {
                label: item.label.clone(),
            })?;
        confusion[gold][model.predict_index(&item.text)] += 1;
    }
    EvalRun::from_confusion(labels, confusion, model.params().seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        ["a", "b", "c"][..n].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn hand_three_by_three() {
        // gold rows, predicted columns
        let m = vec![vec![5, 1, 0], vec![2, 3, 1], vec![0, 0, 4]];
        let r = EvalRun::from_confusion(labels(3), m, 0).unwrap();
        assert!((r.accuracy - 12.0 / 16.0).abs() < 1e-12);
        let p = [5.0 / 7.0, 3.0 / 4.0, 4.0 / 5.0];
        let rc = [5.0 / 6.0, 3.0 / 6.0, 1.0];
        let f: Vec<f64> = (0..3).map(|i| 2.0 * p[i] * rc[i] / (p[i] + rc[i])).collect();
        assert!((r.macro_precision - p.iter().sum::<f64>() / 3.0).abs() < 1e-12);
        assert!((r.macro_recall - rc.iter().sum::<f64>() / 3.0).abs() < 1e-12);
        assert!((r.macro_f1 - f.iter().sum::<f64>() / 3.0).abs() < 1e-12);
        assert_eq!(r.per_class[1].support, 6);
    }

    #[test]
    fn perfect_and_absent_class() {
        let r = EvalRun::from_confusion(labels(2), vec![vec![3, 0], vec![0, 2]], 0).unwrap();
        assert_eq!((r.accuracy, r.macro_f1), (1.0, 1.0));
        // nothing predicted as b
        let r = EvalRun::from_confusion(labels(2), vec![vec![3, 0], vec![2, 0]], 0).unwrap();
        assert_eq!(r.per_class[1].precision, 0.0);
        assert_eq!(r.per_class[1].f1, 0.0);
    }

    #[test]
    fn renders_heat_table() {
        let r = EvalRun::from_confusion(labels(2), vec![vec![3, 1], vec![0, 2]], 0).unwrap();
        let t = r.render_confusion();
        assert!(t.contains("0.75"));
        assert!(t.lines().next().unwrap().starts_with("count"));
    }
}
