//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the report is always printed.

use std::collections::HashMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use promptaug::augment::{build_prompt, parse_numbered_list, FilterVerdict, GenerationRecord, PromptVariant};
use promptaug::corpus::{
    load_corpus, mix, stratified_split, ClassSet, CorpusBundle, LabeledText, MixRatio, ScarcityConfig, SplitRatios,
};
use promptaug::diversity::{dist_n, normalize_corpus, self_bleu, sentence_bleu, TokenizedCorpus, BLEU_EPSILON};
use promptaug::eval::{agreement, evaluate, paired_t_test, scarcity_sweep, train, SweepConfig, TrainParams};
use promptaug::llm::YesNo;
use promptaug::pipeline::{augment_and_mix, PromptAug};
use promptaug::runner::RunManifest;
use promptaug::{synthetic, Error};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// 1 -------------------------------------------------------------------------

fn filter_conjunction() -> Outcome {
    let start = Instant::now();
    let yn = |b: bool| if b { YesNo::Yes } else { YesNo::No };
    let mut passing = Vec::new();
    for mask in 0..8u8 {
        let (a, b, c) = (mask & 4 != 0, mask & 2 != 0, mask & 1 != 0);
        if FilterVerdict::from_outcomes(yn(a), yn(b), yn(c)).pass() {
            passing.push((a, b, c));
        }
    }
    ensure(passing == [(true, true, true)], format!("passing combinations {passing:?}"))?;

    let verdict = prop_oneof![Just(YesNo::Yes), Just(YesNo::No), Just(YesNo::Indeterminate)];
    let mut runner = TestRunner::new(PropConfig { failure_persistence: None, ..PropConfig::with_cases(2000) });
    ok(runner.run(&(verdict.clone(), verdict.clone(), verdict), |(a, b, c)| {
        let v = FilterVerdict::from_outcomes(a, b, c);
        prop_assert_eq!(v.pass(), a.is_yes() && b.is_yes() && c.is_yes());
        Ok(())
    }))?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), format!("took {took:?}"))?;
    Ok(format!("only (yes, yes, yes) passes; 2000 random verdicts agree with A∧B∧C in {took:.0?}"))
}

// 2 -------------------------------------------------------------------------

fn sarcasm_fixture() -> Result<(ClassSet, Vec<LabeledText>), String> {
    let classes = ok(ClassSet::load(fixtures().join("sarcasm/classes.json")))?;
    let examples = ok(load_corpus(fixtures().join("sarcasm/examples.jsonl"), &classes))?;
    Ok((classes, examples))
}

fn prompt_fidelity() -> Outcome {
    let (classes, examples) = sarcasm_fixture()?;
    let sarcasm = classes.get("Sarcasm").ok_or("no Sarcasm class")?;
    let bundle = ok(build_prompt(sarcasm, &examples, 5, PromptVariant::Full))?;
    let p = &bundle.rendered;
    for needle in [
        "In a numbered list, write 5 new social media comments containing Sarcasm",
        " directed at other users.",
        "Here are some examples;\n\n\"oh dear boo Hoo\",\n\"Wow, you've sure convinced me a bill of rights drafted by British representatives elected by the British public which can be changed at anytime should the British people deem it necessary is a bad idea\",\n\"Sounds like a stable police officer.\"",
        "Sarcasm is defined as; humorous communication (bitter, biting, cynical, hurtful tone, incl. swearwords)",
    ] {
        ensure(p.contains(needle), format!("prompt lacks {needle:?}"))?;
    }
    let expected = ok(fs::read_to_string(fixtures().join("sarcasm/prompt.txt")))?;
    ensure(*p == expected, "rendered prompt differs from the reference prompt fixture")?;
    Ok("instruction, context, examples and definition reproduce the reference prompt fixture".into())
}

// 3 -------------------------------------------------------------------------

fn parser_fixture() -> Outcome {
    let raw = ok(fs::read_to_string(fixtures().join("sarcasm/response.txt")))?;
    let expected = ok(fs::read_to_string(fixtures().join("sarcasm/expected_items.txt")))?;
    let expected: Vec<&str> = expected.lines().collect();
    let parsed = ok(parse_numbered_list(&raw, 5))?;
    ensure(parsed.items.len() == 5 && parsed.found == 5, format!("{} items", parsed.items.len()))?;
    ensure(parsed.items == expected, format!("items {:?}", parsed.items))?;
    Ok("5 items match the quoted comments".into())
}

// 4 -------------------------------------------------------------------------

fn naive_dist(sentences: &[Vec<String>], n: usize) -> f64 {
    let mut seen: Vec<Vec<String>> = Vec::new();
    let mut total = 0;
    for s in sentences {
        if s.len() < n {
            continue;
        }
        for i in 0..=s.len() - n {
            total += 1;
            let g = s[i..i + n].to_vec();
            if !seen.contains(&g) {
                seen.push(g);
            }
        }
    }
    seen.len() as f64 / total as f64
}

fn count_of(tokens: &[String], gram: &[String]) -> usize {
    if tokens.len() < gram.len() {
        return 0;
    }
    (0..=tokens.len() - gram.len()).filter(|&i| tokens[i..i + gram.len()] == *gram).count()
}

fn naive_bleu(hyp: &[String], refs: &[&Vec<String>]) -> f64 {
    let mut log_sum = 0.0;
    let mut weights = 0.0;
    for n in 1..=4 {
        if hyp.len() < n {
            continue;
        }
        let grams: Vec<&[String]> = (0..=hyp.len() - n).map(|i| &hyp[i..i + n]).collect();
        let mut distinct: Vec<&[String]> = Vec::new();
        for g in &grams {
            if !distinct.contains(g) {
                distinct.push(g);
            }
        }
        let clipped: usize = distinct
            .iter()
            .map(|g| {
                let ref_max = refs.iter().map(|r| count_of(r, g)).max().unwrap_or(0);
                count_of(hyp, g).min(ref_max)
            })
            .sum();
        let num = if clipped == 0 { BLEU_EPSILON } else { clipped as f64 };
        log_sum += 0.25 * (num / grams.len() as f64).ln();
        weights += 0.25;
    }
    let c = hyp.len() as i64;
    let mut r = refs[0].len() as i64;
    for rf in refs {
        let l = rf.len() as i64;
        if (l - c).abs() < (r - c).abs() || ((l - c).abs() == (r - c).abs() && l < r) {
            r = l;
        }
    }
    let bp = if c > r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    bp * (log_sum / weights).exp()
}

fn naive_self_bleu(sentences: &[Vec<String>]) -> f64 {
    let mut sum = 0.0;
    for (i, s) in sentences.iter().enumerate() {
        let refs: Vec<&Vec<String>> = sentences.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r).collect();
        sum += naive_bleu(s, &refs);
    }
    sum / sentences.len() as f64
}

fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

fn diversity_oracles() -> Outcome {
    let vocab = ["a", "b", "c", "d", "e", "f"];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n_sent = rng.random_range(2..=20);
        let sentences: Vec<Vec<String>> = (0..n_sent)
            .map(|_| {
                let len = rng.random_range(1..=15);
                (0..len).map(|_| vocab.choose(&mut rng).unwrap().to_string()).collect()
            })
            .collect();
        let corpus = TokenizedCorpus::from_sentences(sentences.clone());
        for n in [1, 2] {
            worst = worst.max((ok(dist_n(&corpus, n))? - naive_dist(&sentences, n)).abs());
        }
        worst = worst.max((ok(self_bleu(&corpus, None))? - naive_self_bleu(&sentences)).abs());
    }
    ensure(worst <= 1e-9, format!("max deviation from the oracle {worst:e}"))?;

    let same = TokenizedCorpus::from_sentences(vec![toks("the cat sat on the mat"); 4]);
    let within = ok(self_bleu(&same, None))?;
    ensure((within - 1.0).abs() <= 1e-9, format!("identical corpus gives {within}"))?;

    let disjoint = TokenizedCorpus::from_sentences(vec![toks("one two three four"), toks("five six seven eight")]);
    let apart = ok(self_bleu(&disjoint, None))?;
    ensure(apart <= 1e-8, format!("disjoint pair gives {apart:e}"))?;

    let closed = ok(sentence_bleu(&toks("a b c d"), &[toks("a b c d e")], &[0.25; 4]))?;
    ensure((closed - (-0.25f64).exp()).abs() <= 1e-12, format!("closed form gives {closed}"))?;
    Ok(format!("50 random corpora within {worst:.1e} of the naive oracle; identity, disjoint and exp(-0.25) cases hold"))
}

// 5 -------------------------------------------------------------------------

fn normalization() -> Outcome {
    let sentence = prop::collection::vec("[a-e]{1,3}", 1..12);
    let corpus = prop::collection::vec(sentence, 1..30);
    let mut runner = TestRunner::new(PropConfig { failure_persistence: None, ..PropConfig::with_cases(500) });
    ok(runner.run(&(corpus, any::<u64>(), any::<prop::sample::Index>()), |(sentences, seed, pick)| {
        let c = TokenizedCorpus::from_sentences(sentences);
        let budget = pick.index(c.total_words()) + 1;
        let longest = c.sentences().iter().map(Vec::len).max().unwrap();
        let a = normalize_corpus(&c, budget, seed).unwrap();
        prop_assert!(a.total_words() >= budget);
        prop_assert!(a.total_words() < budget + longest);
        prop_assert_eq!(&a, &normalize_corpus(&c, budget, seed).unwrap());
        Ok(())
    }))?;
    Ok("500 random corpora: words in [budget, budget + longest), same seed gives the same corpus".into())
}

// 6 -------------------------------------------------------------------------

fn contamination_guard() -> Outcome {
    let classes = synthetic::classes();
    let full = synthetic::corpus(0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for run in 0..100u64 {
        let per_class = rng.random_range(10..=25);
        let mut counts: HashMap<&str, usize> = HashMap::new();
        let data: Vec<LabeledText> = full
            .iter()
            .filter(|t| {
                let c = counts.entry(t.label.as_str()).or_default();
                *c += 1;
                *c <= per_class
            })
            .cloned()
            .collect();
        let bundle = ok(stratified_split(&data, &classes, SplitRatios::default(), run))?;
        let before = bundle.fingerprints().clone();
        let augmenter = PromptAug {
            gateway: synthetic::vocabulary_restoring_gateway(),
            params: promptaug::augment::AugmentParams {
                seed: run,
                ..Default::default()
            },
        };
        let ratio = ok(if run % 2 == 0 { MixRatio::new(1, 1) } else { MixRatio::new(10, 1) })?;
        let (mixed, out) = ok(augment_and_mix(&bundle, &augmenter, ratio, run))?;
        ensure(
            mixed.fingerprints().validation == before.validation && mixed.fingerprints().test == before.test,
            format!("run {run}: held-out fingerprints changed"),
        )?;
        ensure(mixed.held_out_intact(), format!("run {run}: held-out splits altered"))?;

        let victim = &bundle.test()[rng.random_range(0..bundle.test().len())];
        let mut poisoned = out.items.clone();
        poisoned.push(LabeledText::augmented("leaked text", victim.label.clone(), "promptaug", vec![victim.id.clone()]));
        match mix(&bundle, &poisoned, ratio, run) {
            Err(Error::Contamination { .. }) => {}
            other => return Err(format!("run {run}: injected item not rejected ({:?})", other.map(|_| ()))),
        }
    }
    Ok("100 randomized runs keep held-out fingerprints; every test-sourced item is rejected".into())
}

// 7 -------------------------------------------------------------------------

fn two_class_bundle(n: usize) -> Result<CorpusBundle, String> {
    let all = synthetic::classes();
    let classes = ok(ClassSet::new(vec![
        all.get("Teasing").unwrap().clone(),
        all.get("Sarcasm").unwrap().clone(),
    ]))?;
    let item = |split: &str, i: usize, label: &str| LabeledText::original(format!("{split} {label} item {i}"), label);
    let mut train_items = Vec::new();
    for i in 0..n {
        train_items.push(item("train", i, "Teasing"));
        train_items.push(item("train", i, "Sarcasm"));
    }
    let held = |split: &str| vec![item(split, 0, "Teasing"), item(split, 0, "Sarcasm")];
    ok(CorpusBundle::from_splits(classes, train_items, held("validation"), held("test"), 0))
}

fn added_per_class(mixed: &CorpusBundle) -> HashMap<String, usize> {
    let mut added = HashMap::new();
    for t in mixed.train().iter().filter(|t| t.method.is_some()) {
        *added.entry(t.label.clone()).or_insert(0) += 1;
    }
    added
}

fn ratio_control() -> Outcome {
    let ten = ok(MixRatio::new(10, 1))?;
    let one = ok(MixRatio::new(1, 1))?;
    for n in 1..=50usize {
        let bundle = two_class_bundle(n)?;
        // surplus pool: more than either quota for every class
        let pool: Vec<LabeledText> = ["Teasing", "Sarcasm"]
            .iter()
            .flat_map(|c| (0..n + 7).map(move |i| LabeledText::augmented(format!("{c} extra {i}"), *c, "mock", vec![])))
            .collect();
        for (ratio, want) in [(ten, n.div_ceil(10)), (one, n)] {
            let added = added_per_class(&ok(mix(&bundle, &pool, ratio, n as u64))?);
            for c in ["Teasing", "Sarcasm"] {
                let got = added.get(c).copied().unwrap_or(0);
                ensure(got == want, format!("n={n} ratio {ratio}: {c} got {got}, want {want}"))?;
            }
        }
    }
    for n in [1, 9, 10, 11, 25, 50] {
        let bundle = two_class_bundle(n)?;
        let augmenter = PromptAug {
            gateway: synthetic::vocabulary_restoring_gateway(),
            params: promptaug::augment::AugmentParams::default(),
        };
        for (ratio, want) in [(ten, n.div_ceil(10)), (one, n)] {
            let (mixed, _) = ok(augment_and_mix(&bundle, &augmenter, ratio, 0))?;
            let added = added_per_class(&mixed);
            ensure(
                added.values().all(|&v| v == want) && added.len() == 2,
                format!("end to end n={n} ratio {ratio}: {added:?}"),
            )?;
        }
    }
    Ok("class sizes 1..50: 10:1 adds ceil(n/10), 1:1 adds n, also end to end with the mock".into())
}

// 8 -------------------------------------------------------------------------

/// Two-sided p by Simpson integration of the t density after x = √ν·tanθ,
/// which turns the tail into ∫ cos^(ν−1)θ dθ over a finite interval.
fn p_oracle(t: f64, dof: f64) -> f64 {
    let integral = |hi: f64| {
        let steps = 20_000;
        let h = hi / steps as f64;
        let f = |th: f64| th.cos().powf(dof - 1.0);
        let mut s = f(0.0) + f(hi);
        for i in 1..steps {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    let half = std::f64::consts::FRAC_PI_2;
    let whole = integral(half);
    let inner = integral((t.abs() / dof.sqrt()).atan());
    (whole - inner) / whole
}

fn statistics() -> Outcome {
    let base = [0.70, 0.71, 0.69, 0.72, 0.70];
    let a: Vec<f64> = base.iter().zip(1..=5).map(|(b, d)| b + d as f64).collect();
    let r = ok(paired_t_test(&a, &base, 0.05))?;
    ensure((r.t_value - 4.2426).abs() < 1e-4, format!("t = {}", r.t_value))?;
    ensure(r.dof == 4, format!("dof = {}", r.dof))?;
    ensure((r.p_value - 0.0132).abs() < 1e-4, format!("p = {}", r.p_value))?;

    let mut worst = 0.0f64;
    for dof in 1..=30u32 {
        for step in -20..=20 {
            let t = step as f64 * 0.5;
            let p = promptaug::eval::student_t_two_sided(t, dof as f64);
            worst = worst.max((p - p_oracle(t, dof as f64)).abs());
        }
    }
    ensure(worst <= 1e-8, format!("p-value oracle deviation {worst:e}"))?;

    let kappa = ok(agreement(&["x", "x", "y", "y"], &["x", "y", "x", "y"]))?.kappa;
    ensure(kappa.abs() <= 1e-12, format!("chance-level kappa {kappa}"))?;
    Ok(format!("t={:.4}, dof=4, p={:.4}; CDF oracle within {worst:.1e}; chance kappa 0", r.t_value, r.p_value))
}

// 9 -------------------------------------------------------------------------

fn extrinsic_harness() -> Outcome {
    let bundle = ok(synthetic::bundle(0))?;
    let start = Instant::now();
    let run = ok(evaluate(&ok(train(&bundle, TrainParams::default()))?, bundle.test()))?;
    let took = start.elapsed();
    ensure(run.accuracy >= 0.95, format!("full-data accuracy {:.3}", run.accuracy))?;
    ensure(took < Duration::from_secs(10), format!("training took {took:?}"))?;

    let augmenter = PromptAug {
        gateway: synthetic::vocabulary_restoring_gateway(),
        params: Default::default(),
    };
    let config = SweepConfig {
        scarcity: ok(ScarcityConfig::new(vec![0.2, 1.0], 0))?,
        ratio: ok(MixRatio::new(1, 1))?,
        ..SweepConfig::default()
    };
    let table = ok(scarcity_sweep(&bundle, &augmenter, &config))?;
    let low = &table.summary[0];
    let (base, aug) = (low.baseline_accuracy.mean, low.augmented_accuracy.mean);
    ensure(aug > base, format!("fraction 0.2: augmented {aug:.3} vs baseline {base:.3}"))?;
    Ok(format!(
        "accuracy {:.3} in {took:.1?}; at fraction 0.2 augmented {aug:.3} > baseline {base:.3}",
        run.accuracy
    ))
}

// 10 and 11 ------------------------------------------------------------------

fn cli(args: &[&str]) -> Result<std::process::Output, String> {
    ok(Command::new(env!("CARGO_BIN_EXE_promptaug")).args(args).output())
}

fn determinism() -> Outcome {
    let dir = ok(tempfile::tempdir())?;
    let corpus = fixtures().join("synthetic/corpus.jsonl");
    let classes = fixtures().join("synthetic/classes.json");
    let mut results = Vec::new();
    for name in ["first", "second"] {
        let out = dir.path().join(name);
        let o = cli(&[
            "augment",
            "--corpus",
            corpus.to_str().unwrap(),
            "--classes",
            classes.to_str().unwrap(),
            "--llm-mock",
            "builtin:synthetic",
            "--deterministic",
            "--seeds",
            "3",
            "--out",
            out.to_str().unwrap(),
        ])?;
        ensure(o.status.code() == Some(0), format!("augment exited {:?}: {}", o.status, String::from_utf8_lossy(&o.stderr)))?;
        let corpus_bytes = ok(fs::read(out.join("augmented.jsonl")))?;
        let manifest = ok(RunManifest::load(&out))?;
        results.push((corpus_bytes, manifest.outputs));
    }
    ensure(!results[0].0.is_empty(), "empty augmented corpus")?;
    ensure(results[0].0 == results[1].0, "augmented corpora differ")?;
    ensure(results[0].1 == results[1].1, "manifest digests differ")?;
    Ok(format!("{} output digests identical across two runs", results[0].1.len()))
}

fn ablation_plumbing() -> Outcome {
    let dir = ok(tempfile::tempdir())?;
    let out = dir.path().join("ablate");
    let o = cli(&[
        "ablate",
        "--corpus",
        fixtures().join("synthetic/corpus.jsonl").to_str().unwrap(),
        "--classes",
        fixtures().join("synthetic/classes.json").to_str().unwrap(),
        "--llm-mock",
        "builtin:synthetic",
        "--seeds",
        "0",
        "--out",
        out.to_str().unwrap(),
    ])?;
    ensure(o.status.success(), format!("ablate failed: {}", String::from_utf8_lossy(&o.stderr)))?;

    let report = cli(&["report", out.to_str().unwrap()])?;
    let text = String::from_utf8_lossy(&report.stdout).into_owned();
    let table: Vec<&str> = text
        .lines()
        .skip_while(|l| !l.starts_with("Prompt component ablation"))
        .skip(2)
        .take_while(|l| !l.trim().is_empty())
        .collect();
    ensure(table.len() == 4, format!("ablation table has {} rows:\n{text}", table.len()))?;

    let absent: [(PromptVariant, &[&str]); 4] = [
        (PromptVariant::Full, &[]),
        (PromptVariant::NoExamples, &["Here are some examples"]),
        (PromptVariant::NoDefinition, &["is defined as"]),
        (PromptVariant::NoContext, &["directed at other users", "social media"]),
    ];
    let all_parts = ["Here are some examples", "is defined as", "directed at other users", "In a numbered list"];
    for (variant, missing) in absent {
        let vdir = out.join(variant.as_str());
        ensure(vdir.join("manifest.json").is_file(), format!("no run for {variant}"))?;
        let log = ok(fs::read_to_string(vdir.join("generations.jsonl")))?;
        let first: GenerationRecord = ok(serde_json::from_str(log.lines().next().ok_or("empty log")?))?;
        let prompt = &first.bundle.rendered;
        for part in all_parts {
            let should_lack = missing.iter().any(|m| m == &part);
            ensure(
                prompt.contains(part) != should_lack,
                format!("{variant}: presence of {part:?} is wrong in {prompt:?}"),
            )?;
        }
        for m in missing {
            ensure(!prompt.contains(m), format!("{variant} still contains {m:?}"))?;
        }
    }
    Ok("four variant runs, 4-row table, each prompt lacks exactly its component".into())
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("filter conjunction", filter_conjunction),
        ("prompt fidelity", prompt_fidelity),
        ("parser fixture", parser_fixture),
        ("diversity oracles", diversity_oracles),
        ("normalization", normalization),
        ("contamination guard", contamination_guard),
        ("ratio control", ratio_control),
        ("statistics", statistics),
        ("extrinsic harness", extrinsic_harness),
        ("determinism", determinism),
        ("ablation plumbing", ablation_plumbing),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {id:>2} {name:<20} PASS  {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {id:>2} {name:<20} FAIL  {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
