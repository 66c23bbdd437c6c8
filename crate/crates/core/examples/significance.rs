// Paired t-test over per-seed accuracies and annotator agreement.
//
//     cargo run --example significance

use promptaug::eval::{agreement, paired_t_test, DEFAULT_THRESHOLD};

fn main() -> promptaug::Result<()> {
    run_example()
}

pub fn run_example() -> promptaug::Result<()> {
    let orig = [0.712, 0.705, 0.718, 0.709, 0.714];
    let paug = [0.731, 0.722, 0.740, 0.728, 0.735];
    let r = paired_t_test(&paug, &orig, DEFAULT_THRESHOLD)?;
    println!(
        "t = {:.2}, dof = {}, p = {:.4}, significant at {}: {}",
        r.t_value, r.dof, r.p_value, r.threshold, r.significant
    );

    let a = ["yes", "yes", "no", "yes", "no", "yes", "yes", "no"];
    let b = ["yes", "no", "no", "yes", "no", "yes", "yes", "yes"];
    let k = agreement(&a, &b)?;
    println!("{:.0}% agreement, kappa {:.2} ({})", k.percent * 100.0, k.kappa, k.band());
    Ok(())
}
