use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusBundle, LabeledText};
use crate::diversity::tokenize;
use crate::error::{Error, Result};
use crate::rng_for;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    /// Hashed feature dimension.
    pub dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            dim: 1 << 18,
            epochs: 10,
            learning_rate: 0.1,
            seed: 0,
        }
    }
}

impl TrainParams {
    pub fn with_seed(self, seed: u64) -> Self {
        TrainParams { seed, ..self }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Sparse unigram + bigram counts, hashed into `dim` buckets.
pub fn featurize(text: &str, dim: usize) -> Vec<(usize, f64)> {
    let tokens = tokenize(text);
    let mut idx: Vec<usize> = Vec::with_capacity(tokens.len() * 2);
    for t in &tokens {
        idx.push((fnv1a(format!("1\u{1f}{t}").as_bytes()) % dim as u64) as usize);
    }
    for w in tokens.windows(2) {
        idx.push((fnv1a(format!("2\u{1f}{}\u{1f}{}", w[0], w[1]).as_bytes()) % dim as u64) as usize);
    }
    idx.sort_unstable();
    let mut feats: Vec<(usize, f64)> = Vec::new();
    for i in idx {
        match feats.last_mut() {
            Some((j, c)) if *j == i => *c += 1.0,
            _ => feats.push((i, 1.0)),
        }
    }
    feats
}

/// Multinomial logistic regression over hashed n-gram features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearTextModel {
    labels: Vec<String>,
    params: TrainParams,
    /// Class-major: `weights[c * dim + f]`.
    weights: Vec<f64>,
    bias: Vec<f64>,
    /// Mean training cross-entropy after each epoch.
    pub train_loss: Vec<f64>,
    pub validation_loss: Vec<f64>,
    /// 1-based epoch whose weights were kept.
    pub selected_epoch: usize,
}

struct Example {
    feats: Vec<(usize, f64)>,
    label: usize,
}

impl LinearTextModel {
    fn zeros(labels: Vec<String>, params: TrainParams) -> Self {
        let l = labels.len();
        LinearTextModel {
            weights: vec![0.0; l * params.dim],
            bias: vec![0.0; l],
            labels,
            params,
            train_loss: Vec::new(),
            validation_loss: Vec::new(),
            selected_epoch: 0,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn params(&self) -> &TrainParams {
        &self.params
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn probs(&self, feats: &[(usize, f64)]) -> Vec<f64> {
        let d = self.params.dim;
        let logits: Vec<f64> = (0..self.labels.len())
            .map(|c| self.bias[c] + feats.iter().map(|(f, x)| self.weights[c * d + f] * x).sum::<f64>())
            .collect();
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / sum).collect()
    }

    pub fn predict_proba(&self, text: &str) -> Vec<f64> {
        self.probs(&featurize(text, self.params.dim))
    }

    /// Index of the most probable label; ties go to the earlier label.
    pub fn predict_index(&self, text: &str) -> usize {
        let p = self.predict_proba(text);
        let mut best = 0;
        for (i, v) in p.iter().enumerate() {
            if *v > p[best] {
                best = i;
            }
        }
        best
    }

    pub fn predict(&self, text: &str) -> &str {
        &self.labels[self.predict_index(text)]
    }

    fn loss(&self, data: &[Example]) -> f64 {
        let total: f64 = data
            .iter()
            .map(|e| -self.probs(&e.feats)[e.label].max(1e-300).ln())
            .sum();
        total / data.len() as f64
    }

    fn sgd_step(&mut self, e: &Example, lr: f64) {
        let p = self.probs(&e.feats);
        let d = self.params.dim;
        for (c, pc) in p.iter().enumerate() {
            let g = pc - if c == e.label { 1.0 } else { 0.0 };
            self.bias[c] -= lr * g;
            for (f, x) in &e.feats {
                self.weights[c * d + f] -= lr * g * x;
            }
        }
    }
}

fn examples(items: &[LabeledText], labels: &[String], dim: usize) -> Result<Vec<Example>> {
    items
        .iter()
        .map(|t| {
            let label = labels.iter().position(|l| *l == t.label).ok_or_else(|| Error::UnknownLabel {
                label: t.label.clone(),
            })?;
            Ok(Example {
                feats: featurize(&t.text, dim),
                label,
            })
        })
        .collect()
}

/// Fits the model by SGD on the training split; the validation split only
/// picks which epoch's weights are kept (lowest loss, earliest on ties).
pub fn train(bundle: &CorpusBundle, params: TrainParams) -> Result<LinearTextModel> {
    if params.dim == 0 || params.epochs == 0 || params.learning_rate.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Training("dim, epochs and learning rate must be positive".into()));
    }
    let labels: Vec<String> = bundle.classes().names().iter().map(|s| s.to_string()).collect();
    let train = examples(bundle.train(), &labels, params.dim)?;
    if train.is_empty() {
        return Err(Error::Training("training split is empty".into()));
    }
    let first = train[0].label;
    if train.iter().all(|e| e.label == first) {
        return Err(Error::Training(format!(
            "training split has a single class ({})",
            labels[first]
        )));
    }
    let validation = examples(bundle.validation(), &labels, params.dim)?;

    let mut model = LinearTextModel::zeros(labels, params);
    let mut best: Option<(f64, Vec<f64>, Vec<f64>, usize)> = None;
    let mut order: Vec<usize> = (0..train.len()).collect();
    for epoch in 1..=params.epochs {
        order.shuffle(&mut rng_for(params.seed, epoch as u64));
        for &i in &order {
            model.sgd_step(&train[i], params.learning_rate);
        }
        model.train_loss.push(model.loss(&train));
        if !validation.is_empty() {
            let v = model.loss(&validation);
            model.validation_loss.push(v);
            if best.as_ref().is_none_or(|(b, ..)| v < *b) {
                best = Some((v, model.weights.clone(), model.bias.clone(), epoch));
            }
        }
    }
    match best {
        Some((_, w, b, epoch)) => {
            model.weights = w;
            model.bias = b;
            model.selected_epoch = epoch;
        }
        None => model.selected_epoch = params.epochs,
    }
    Ok(model)
}
