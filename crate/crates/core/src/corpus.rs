//! Labeled corpora: loading, stratified splitting, scarcity subsampling and
//! ratio-controlled mixing of augmented data.
//!
//! A [`CorpusBundle`] is immutable once built. Every operation returns a new
//! bundle and recomputes only the training fingerprint, so the validation and
//! test fingerprints taken at split time can be checked at any later stage.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng_for;

/// A behaviour class and the text used to describe it in prompts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub name: String,
    pub definition: String,
    /// Communication type, e.g. "humorous" or "abusive".
    #[serde(default)]
    pub comm_type: String,
    #[serde(default)]
    pub descriptors: Vec<String>,
}

impl ClassSpec {
    pub fn new(
        name: impl Into<String>,
        definition: impl Into<String>,
        comm_type: impl Into<String>,
        descriptors: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self> {
        let spec = ClassSpec {
            name: name.into(),
            definition: definition.into(),
            comm_type: comm_type.into(),
            descriptors: descriptors.into_iter().map(Into::into).collect(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::InvalidClassSpec("class name is empty".into()));
        }
        if self.definition.trim().is_empty() {
            return Err(Error::InvalidClassSpec(format!(
                "class {:?} has an empty definition",
                self.name
            )));
        }
        Ok(())
    }

    /// `"{comm_type} communication ({descriptors})"`, falling back to the
    /// free-text definition when no communication type is given.
    pub fn characteristic(&self) -> String {
        let comm = self.comm_type.trim();
        if comm.is_empty() {
            return self.definition.trim().to_string();
        }
        if self.descriptors.is_empty() {
            format!("{comm} communication")
        } else {
            format!("{comm} communication ({})", self.descriptors.join(", "))
        }
    }
}

/// Ordered set of class specs with unique names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ClassSetDoc", into = "ClassSetDoc")]
pub struct ClassSet {
    classes: Vec<ClassSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ClassSetDoc {
    Wrapped { classes: Vec<ClassSpec> },
    Bare(Vec<ClassSpec>),
}

impl TryFrom<ClassSetDoc> for ClassSet {
    type Error = Error;
    fn try_from(doc: ClassSetDoc) -> Result<Self> {
        match doc {
            ClassSetDoc::Wrapped { classes } | ClassSetDoc::Bare(classes) => ClassSet::new(classes),
        }
    }
}

impl From<ClassSet> for ClassSetDoc {
    fn from(set: ClassSet) -> Self {
        ClassSetDoc::Wrapped {
            classes: set.classes,
        }
    }
}

impl ClassSet {
    pub fn new(classes: Vec<ClassSpec>) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::InvalidClassSpec("no classes given".into()));
        }
        let mut seen = HashSet::new();
        for class in &classes {
            class.validate()?;
            if !seen.insert(class.name.as_str()) {
                return Err(Error::InvalidClassSpec(format!(
                    "duplicate class name {:?}",
                    class.name
                )));
            }
        }
        Ok(ClassSet { classes })
    }

    /// Reads a class-spec document: `{"classes": [...]}` or a bare array.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&raw).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn get(&self, name: &str) -> Option<&ClassSpec> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ClassSpec> {
        self.classes.iter()
    }

    pub fn names(&self) -> Vec<&str> {
        self.classes.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Position of a class in the set, used as the label index.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Original,
    Augmented,
}

impl Origin {
    fn as_str(self) -> &'static str {
        match self {
            Origin::Original => "original",
            Origin::Augmented => "augmented",
        }
    }
}

/// One datapoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledText {
    pub id: String,
    pub text: String,
    pub label: String,
    pub origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub source_ids: Vec<String>,
}

/// Stable id: a digest of text, label, origin and method.
pub fn content_id(text: &str, label: &str, origin: Origin, method: Option<&str>) -> String {
    let mut hasher = Sha256::new();
    for part in [text, label, origin.as_str(), method.unwrap_or("")] {
        hasher.update(part.as_bytes());
        hasher.update([0x1f]);
    }
    hex::encode(&hasher.finalize()[..12])
}

impl LabeledText {
    pub fn original(text: impl Into<String>, label: impl Into<String>) -> Self {
        let text = text.into();
        let label = label.into();
        LabeledText {
            id: content_id(&text, &label, Origin::Original, None),
            text,
            label,
            origin: Origin::Original,
            method: None,
            source_ids: Vec::new(),
        }
    }

    pub fn augmented(
        text: impl Into<String>,
        label: impl Into<String>,
        method: impl Into<String>,
        source_ids: Vec<String>,
    ) -> Self {
        let text = text.into();
        let label = label.into();
        let method = method.into();
        LabeledText {
            id: content_id(&text, &label, Origin::Augmented, Some(&method)),
            text,
            label,
            origin: Origin::Augmented,
            method: Some(method),
            source_ids,
        }
    }

    pub fn validate(&self, classes: &ClassSet) -> Result<()> {
        if self.text.trim().is_empty() {
            return Err(Error::InvalidArgument(format!("item {} has empty text", self.id)));
        }
        if !classes.contains(&self.label) {
            return Err(Error::UnknownLabel {
                label: self.label.clone(),
            });
        }
        if self.origin == Origin::Augmented && self.method.is_none() {
            return Err(Error::InvalidArgument(format!(
                "augmented item {} has no method",
                self.id
            )));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct RawRecord {
    text: Option<String>,
    label: Option<String>,
    id: Option<String>,
    origin: Option<Origin>,
    method: Option<String>,
    #[serde(default)]
    source_ids: Vec<String>,
}

fn read_raw_records(path: &Path) -> Result<Vec<(usize, RawRecord)>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RawRecord = serde_json::from_str(&line).map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: line_no,
            message: e.to_string(),
        })?;
        out.push((line_no, record));
    }
    if out.is_empty() {
        return Err(Error::EmptyCorpus(path.display().to_string()));
    }
    Ok(out)
}

fn require_fields(path: &Path, line: usize, record: &RawRecord) -> Result<(String, String)> {
    let malformed = |message: &str| Error::Malformed {
        path: path.to_path_buf(),
        line,
        message: message.to_string(),
    };
    let text = record.text.clone().ok_or_else(|| malformed("missing field \"text\""))?;
    let label = record.label.clone().ok_or_else(|| malformed("missing field \"label\""))?;
    if text.trim().is_empty() {
        return Err(malformed("empty text"));
    }
    Ok((text, label))
}

/// Assigns ids, appending an occurrence suffix when identical content repeats.
fn unique_id(base: String, seen: &mut HashMap<String, usize>) -> String {
    let count = seen.entry(base.clone()).or_insert(0);
    *count += 1;
    if *count == 1 {
        base
    } else {
        format!("{base}-{count}")
    }
}

/// Loads a line-delimited corpus of original datapoints.
///
/// Every record becomes `origin = original`; an explicit `id` field is kept,
/// otherwise the content digest is used.
pub fn load_corpus(path: impl AsRef<Path>, classes: &ClassSet) -> Result<Vec<LabeledText>> {
    let path = path.as_ref();
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for (line, record) in read_raw_records(path)? {
        let (text, label) = require_fields(path, line, &record)?;
        if !classes.contains(&label) {
            return Err(Error::Malformed {
                path: path.to_path_buf(),
                line,
                message: format!("unknown label {label:?}"),
            });
        }
        let base = record
            .id
            .clone()
            .unwrap_or_else(|| content_id(&text, &label, Origin::Original, None));
        out.push(LabeledText {
            id: unique_id(base, &mut seen),
            text,
            label,
            origin: Origin::Original,
            method: None,
            source_ids: Vec::new(),
        });
    }
    Ok(out)
}

/// Loads a corpus file written by an augmenter, keeping origin, method and
/// source ids. Every record must be augmented.
pub fn load_augmented(path: impl AsRef<Path>, classes: &ClassSet) -> Result<Vec<LabeledText>> {
    let path = path.as_ref();
    let mut out = Vec::new();
    for (line, record) in read_raw_records(path)? {
        let (text, label) = require_fields(path, line, &record)?;
        let malformed = |message: String| Error::Malformed {
            path: path.to_path_buf(),
            line,
            message,
        };
        if !classes.contains(&label) {
            return Err(malformed(format!("unknown label {label:?}")));
        }
        if record.origin != Some(Origin::Augmented) {
            return Err(malformed("record is not marked origin=augmented".into()));
        }
        let method = record
            .method
            .clone()
            .ok_or_else(|| malformed("augmented record has no method".into()))?;
        let id = record
            .id
            .clone()
            .unwrap_or_else(|| content_id(&text, &label, Origin::Augmented, Some(&method)));
        out.push(LabeledText {
            id,
            text,
            label,
            origin: Origin::Augmented,
            method: Some(method),
            source_ids: record.source_ids,
        });
    }
    Ok(out)
}

/// Serializes items in corpus-file format, one JSON object per line.
pub fn to_jsonl(items: &[LabeledText]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("LabeledText serializes"));
        out.push('\n');
    }
    out
}

/// Content digest of a split, order-sensitive.
pub fn fingerprint(items: &[LabeledText]) -> String {
    let mut hasher = Sha256::new();
    for item in items {
        hasher.update(serde_json::to_vec(item).expect("LabeledText serializes"));
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitFingerprints {
    pub train: String,
    pub validation: String,
    pub test: String,
}

/// Train/validation/test splits plus the class set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusBundle {
    classes: ClassSet,
    train: Vec<LabeledText>,
    validation: Vec<LabeledText>,
    test: Vec<LabeledText>,
    fingerprints: SplitFingerprints,
    seed: u64,
}

impl CorpusBundle {
    /// Builds a bundle from explicit splits, checking labels and disjointness.
    pub fn from_splits(
        classes: ClassSet,
        train: Vec<LabeledText>,
        validation: Vec<LabeledText>,
        test: Vec<LabeledText>,
        seed: u64,
    ) -> Result<Self> {
        let mut ids = HashSet::new();
        for item in train.iter().chain(&validation).chain(&test) {
            item.validate(&classes)?;
            if !ids.insert(item.id.as_str()) {
                return Err(Error::InvalidSplit(format!(
                    "id {} appears more than once across splits",
                    item.id
                )));
            }
        }
        let fingerprints = SplitFingerprints {
            train: fingerprint(&train),
            validation: fingerprint(&validation),
            test: fingerprint(&test),
        };
        Ok(CorpusBundle {
            classes,
            train,
            validation,
            test,
            fingerprints,
            seed,
        })
    }

    fn with_train(&self, train: Vec<LabeledText>) -> Self {
        CorpusBundle {
            classes: self.classes.clone(),
            fingerprints: SplitFingerprints {
                train: fingerprint(&train),
                ..self.fingerprints.clone()
            },
            train,
            validation: self.validation.clone(),
            test: self.test.clone(),
            seed: self.seed,
        }
    }

    pub fn classes(&self) -> &ClassSet {
        &self.classes
    }

    pub fn train(&self) -> &[LabeledText] {
        &self.train
    }

    pub fn validation(&self) -> &[LabeledText] {
        &self.validation
    }

    pub fn test(&self) -> &[LabeledText] {
        &self.test
    }

    pub fn fingerprints(&self) -> &SplitFingerprints {
        &self.fingerprints
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Training items of one class, in split order.
    pub fn train_of(&self, label: &str) -> Vec<LabeledText> {
        self.train.iter().filter(|t| t.label == label).cloned().collect()
    }

    /// Recomputes the held-out digests and compares them with the recorded ones.
    pub fn held_out_intact(&self) -> bool {
        fingerprint(&self.validation) == self.fingerprints.validation
            && fingerprint(&self.test) == self.fingerprints.test
    }

    /// Stable identity of the split scheme: the held-out fingerprints.
    pub fn held_out_key(&self) -> (&str, &str) {
        (&self.fingerprints.validation, &self.fingerprints.test)
    }
}

/// Split proportions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.8,
            validation: 0.1,
            test: 0.1,
        }
    }
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self> {
        let ratios = SplitRatios {
            train,
            validation,
            test,
        };
        ratios.validate()?;
        Ok(ratios)
    }

    fn validate(&self) -> Result<()> {
        let parts = [self.train, self.validation, self.test];
        if parts.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidSplit(format!("negative or non-finite ratio in {parts:?}")));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSplit(format!("ratios sum to {sum}, expected 1")));
        }
        Ok(())
    }

    fn as_array(&self) -> [f64; 3] {
        [self.train, self.validation, self.test]
    }
}

/// Largest-remainder allocation of `n` items over `ratios`.
///
/// Ties between equal remainders go to the earlier split.
pub fn largest_remainder(n: usize, ratios: &[f64]) -> Vec<usize> {
    let quotas: Vec<f64> = ratios.iter().map(|r| r * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b))
    });
    for &i in order.iter().take(n.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

fn group_by_label<'a>(
    classes: &ClassSet,
    items: impl IntoIterator<Item = &'a LabeledText>,
) -> Result<BTreeMap<usize, Vec<LabeledText>>> {
    let mut grouped: BTreeMap<usize, Vec<LabeledText>> = BTreeMap::new();
    for item in items {
        let idx = classes.index_of(&item.label).ok_or_else(|| Error::UnknownLabel {
            label: item.label.clone(),
        })?;
        grouped.entry(idx).or_default().push(item.clone());
    }
    Ok(grouped)
}

/// Per-class stratified split with largest-remainder rounding.
///
/// Each class is shuffled with its own seeded stream, then cut into
/// train/validation/test blocks. Classes are emitted in class-set order.
pub fn stratified_split(
    data: &[LabeledText],
    classes: &ClassSet,
    ratios: SplitRatios,
    seed: u64,
) -> Result<CorpusBundle> {
    ratios.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyCorpus("no datapoints to split".into()));
    }
    let grouped = group_by_label(classes, data)?;
    let (mut train, mut validation, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for (class_idx, mut items) in grouped {
        if items.len() < 3 {
            return Err(Error::InvalidSplit(format!(
                "class {:?} has {} datapoints, fewer than the 3 splits",
                classes.names()[class_idx],
                items.len()
            )));
        }
        items.shuffle(&mut rng_for(seed, class_idx as u64));
        let counts = largest_remainder(items.len(), &ratios.as_array());
        let mut rest = items.into_iter();
        train.extend(rest.by_ref().take(counts[0]));
        validation.extend(rest.by_ref().take(counts[1]));
        test.extend(rest);
    }
    CorpusBundle::from_splits(classes.clone(), train, validation, test, seed)
}

/// Number of items kept when subsampling a class of `n` at `fraction`.
pub fn subsample_count(n: usize, fraction: f64) -> usize {
    if n == 0 {
        return 0;
    }
    ((fraction * n as f64).round() as usize).clamp(1, n)
}

/// Reduces the training split per class; held-out splits are untouched.
pub fn subsample_train(bundle: &CorpusBundle, fraction: f64, seed: u64) -> Result<CorpusBundle> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "subsample fraction {fraction} is outside (0, 1]"
        )));
    }
    let grouped = group_by_label(bundle.classes(), bundle.train())?;
    let mut train = Vec::with_capacity(bundle.train().len());
    for (class_idx, items) in grouped {
        let keep = subsample_count(items.len(), fraction);
        let mut picked =
            rand::seq::index::sample(&mut rng_for(seed, class_idx as u64), items.len(), keep)
                .into_vec();
        picked.sort_unstable();
        train.extend(picked.into_iter().map(|i| items[i].clone()));
    }
    Ok(bundle.with_train(train))
}

/// Original-to-augmented proportion, written `O:A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixRatio {
    pub original: u32,
    pub augmented: u32,
}

impl MixRatio {
    pub fn new(original: u32, augmented: u32) -> Result<Self> {
        if original == 0 || augmented == 0 {
            return Err(Error::InvalidArgument(format!(
                "ratio components must be positive, got {original}:{augmented}"
            )));
        }
        Ok(MixRatio {
            original,
            augmented,
        })
    }

    /// ceil(n · augmented / original)
    pub fn quota(&self, n: usize) -> usize {
        let num = n as u64 * self.augmented as u64;
        num.div_ceil(self.original as u64) as usize
    }
}

impl fmt::Display for MixRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.original, self.augmented)
    }
}

impl FromStr for MixRatio {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (o, a) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("ratio {s:?} is not of the form O:A")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<u32>()
                .map_err(|_| Error::InvalidArgument(format!("ratio {s:?} is not of the form O:A")))
        };
        MixRatio::new(parse(o)?, parse(a)?)
    }
}

/// Adds augmented items to the training split, per class, up to
/// `ceil(|train_c| · aug / orig)`. Surplus items are dropped by seeded
/// selection.
pub fn mix(
    bundle: &CorpusBundle,
    augmented: &[LabeledText],
    ratio: MixRatio,
    seed: u64,
) -> Result<CorpusBundle> {
    let held_out: HashMap<&str, &'static str> = bundle
        .validation()
        .iter()
        .map(|t| (t.id.as_str(), "validation"))
        .chain(bundle.test().iter().map(|t| (t.id.as_str(), "test")))
        .collect();
    let train_ids: HashSet<&str> = bundle.train().iter().map(|t| t.id.as_str()).collect();

    let mut unique = Vec::new();
    let mut seen = HashSet::new();
    for item in augmented {
        if item.origin != Origin::Augmented {
            return Err(Error::InvalidArgument(format!(
                "item {} passed to mix is not augmented",
                item.id
            )));
        }
        item.validate(bundle.classes())?;
        for source in &item.source_ids {
            if let Some(split) = held_out.get(source.as_str()) {
                return Err(Error::Contamination {
                    item: item.id.clone(),
                    source_id: source.clone(),
                    split,
                });
            }
        }
        if train_ids.contains(item.id.as_str()) || !seen.insert(item.id.as_str()) {
            continue;
        }
        unique.push(item);
    }

    let mut by_class: BTreeMap<usize, Vec<&LabeledText>> = BTreeMap::new();
    for item in unique {
        let idx = bundle.classes().index_of(&item.label).expect("validated label");
        by_class.entry(idx).or_default().push(item);
    }

    let mut train = bundle.train().to_vec();
    for (class_idx, pool) in by_class {
        let name = &bundle.classes().names()[class_idx];
        let n_train = bundle.train().iter().filter(|t| &t.label == name).count();
        let quota = ratio.quota(n_train);
        if quota >= pool.len() {
            train.extend(pool.into_iter().cloned());
        } else {
            let mut picked = rand::seq::index::sample(
                &mut rng_for(seed, class_idx as u64),
                pool.len(),
                quota,
            )
            .into_vec();
            picked.sort_unstable();
            train.extend(picked.into_iter().map(|i| pool[i].clone()));
        }
    }
    Ok(bundle.with_train(train))
}

/// Fractions of the training split for a scarcity sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScarcityConfig {
    pub fractions: Vec<f64>,
    pub seed: u64,
}

impl Default for ScarcityConfig {
    fn default() -> Self {
        ScarcityConfig {
            fractions: vec![0.2, 0.4, 0.6, 0.8, 1.0],
            seed: 0,
        }
    }
}

impl ScarcityConfig {
    pub fn new(fractions: Vec<f64>, seed: u64) -> Result<Self> {
        let config = ScarcityConfig { fractions, seed };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fractions.is_empty() {
            return Err(Error::InvalidArgument("no scarcity fractions".into()));
        }
        for f in &self.fractions {
            if !(*f > 0.0 && *f <= 1.0) {
                return Err(Error::InvalidArgument(format!("fraction {f} is outside (0, 1]")));
            }
        }
        if self.fractions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "scarcity fractions must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}
