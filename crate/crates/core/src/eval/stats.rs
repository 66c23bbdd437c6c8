use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.05;

/// Mean and sample standard deviation (n − 1 denominator).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Two-sided Student-t tail probability P(|T| ≥ |t|) for `dof` degrees of freedom.
pub fn student_t_two_sided(t: f64, dof: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = dof / (dof + t * t);
    beta_reg(dof / 2.0, 0.5, x).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceResult {
    /// Infinite when the differences have zero variance and a nonzero mean.
    /// JSON has no infinity, so it is written as the string "inf" or "-inf".
    #[serde(with = "extended_f64")]
    pub t_value: f64,
    pub p_value: f64,
    pub dof: usize,
    pub significant: bool,
    pub threshold: f64,
    pub mean_difference: f64,
    pub degenerate: bool,
}

mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        match *v {
            x if x.is_finite() => s.serialize_f64(x),
            x if x.is_nan() => s.serialize_str("nan"),
            x if x > 0.0 => s.serialize_str("inf"),
            _ => s.serialize_str("-inf"),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(x) => Ok(x),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Paired two-sided t-test on `a − b`.
pub fn paired_t_test(a: &[f64], b: &[f64], threshold: f64) -> Result<SignificanceResult> {
    if a.len() != b.len() {
        return Err(Error::Stats(format!(
            "paired samples differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Stats("paired t-test needs at least 2 pairs".into()));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Stats(format!("threshold {threshold} is outside (0, 1)")));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len();
    let dof = n - 1;
    let (mean, sd) = mean_sd(&d);
    let mut result = SignificanceResult {
        t_value: 0.0,
        p_value: 1.0,
        dof,
        significant: false,
        threshold,
        mean_difference: mean,
        degenerate: false,
    };
    if sd == 0.0 {
        if mean != 0.0 {
            result.degenerate = true;
            result.t_value = mean.signum() * f64::INFINITY;
            result.p_value = 0.0;
            result.significant = true;
        }
        return Ok(result);
    }
    let t = mean / (sd / (n as f64).sqrt());
    let p = student_t_two_sided(t, dof as f64);
    result.t_value = t;
    result.p_value = p;
    result.significant = p < threshold;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub percent: f64,
    pub kappa: f64,
    pub n: usize,
}

impl Agreement {
    pub fn band(&self) -> &'static str {
        kappa_band(self.kappa)
    }
}

/// Percent agreement and Cohen's kappa between two annotators.
pub fn agreement<S: AsRef<str>>(labels_a: &[S], labels_b: &[S]) -> Result<Agreement> {
    if labels_a.len() != labels_b.len() {
        return Err(Error::Stats(format!(
            "annotations differ in length ({} vs {})",
            labels_a.len(),
            labels_b.len()
        )));
    }
    if labels_a.is_empty() {
        return Err(Error::Stats("no annotations".into()));
    }
    let n = labels_a.len() as f64;
    let mut labels: Vec<&str> = labels_a.iter().chain(labels_b).map(AsRef::as_ref).collect();
    labels.sort_unstable();
    labels.dedup();
    let count = |side: &[S], l: &str| side.iter().filter(|x| x.as_ref() == l).count() as f64;
    let agree = labels_a.iter().zip(labels_b).filter(|(x, y)| x.as_ref() == y.as_ref()).count() as f64;
    let p_o = agree / n;
    let p_e: f64 = labels
        .iter()
        .map(|l| (count(labels_a, l) / n) * (count(labels_b, l) / n))
        .sum();
    let kappa = if (1.0 - p_e).abs() < 1e-15 {
        if p_o == 1.0 { 1.0 } else { 0.0 }
    } else {
        (p_o - p_e) / (1.0 - p_e)
    };
    Ok(Agreement {
        percent: p_o,
        kappa,
        n: labels_a.len(),
    })
}

/// Landis & Koch interpretation bands.
pub fn kappa_band(kappa: f64) -> &'static str {
    match kappa {
        k if k < 0.0 => "poor agreement",
        k if k <= 0.20 => "slight agreement",
        k if k <= 0.40 => "fair agreement",
        k if k <= 0.60 => "moderate agreement",
        k if k <= 0.80 => "substantial agreement",
        _ => "almost perfect agreement",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// P(|T| ≥ t) by Simpson's rule after x = √ν·tan θ, which turns the
    /// density into cos^(ν−1) θ on a finite interval.
    fn oracle_p(t: f64, dof: f64) -> f64 {
        let f = |th: f64| th.cos().powf(dof - 1.0);
        let simpson = |a: f64, b: f64| {
            let m = 20_000;
            let h = (b - a) / m as f64;
            let mut s = f(a) + f(b);
            for i in 1..m {
                s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        };
        let half_pi = std::f64::consts::FRAC_PI_2;
        let th0 = (t.abs() / dof.sqrt()).atan();
        simpson(th0, half_pi) / simpson(0.0, half_pi)
    }

    #[test]
    fn textbook_case() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = paired_t_test(&a, &[0.0; 5], 0.05).unwrap();
        assert_relative_eq!(r.t_value, 5f64.sqrt() * 3.0 / 2.5f64.sqrt(), epsilon = 1e-12);
        assert_eq!(r.dof, 4);
        assert!((r.p_value - 0.0132).abs() < 1e-4);
        assert!(r.significant);
    }

    #[test]
    fn identity_and_antisymmetry() {
        let a = [0.7, 0.71, 0.69, 0.72, 0.7];
        let r = paired_t_test(&a, &a, 0.05).unwrap();
        assert_eq!((r.t_value, r.p_value, r.significant), (0.0, 1.0, false));
        let b = [0.68, 0.7, 0.7, 0.69, 0.66];
        let ab = paired_t_test(&a, &b, 0.05).unwrap();
        let ba = paired_t_test(&b, &a, 0.05).unwrap();
        assert_eq!(ab.t_value, -ba.t_value);
        assert_eq!(ab.p_value, ba.p_value);
    }

    #[test]
    fn degenerate_and_errors() {
        let r = paired_t_test(&[2.0, 3.0], &[1.0, 2.0], 0.05).unwrap();
        assert!(r.degenerate && r.significant && r.t_value.is_infinite());
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains(r#""t_value":"inf""#), "{json}");
        assert_eq!(serde_json::from_str::<SignificanceResult>(&json).unwrap(), r);
        assert!(paired_t_test(&[1.0], &[1.0], 0.05).is_err());
        assert!(paired_t_test(&[1.0, 2.0], &[1.0], 0.05).is_err());
    }

    #[test]
    fn p_values_match_integration() {
        for dof in 1..=30 {
            for i in 0..=40 {
                let t = -10.0 + 0.5 * i as f64;
                let p = student_t_two_sided(t, dof as f64);
                let o = oracle_p(t, dof as f64);
                assert!((p - o).abs() < 1e-8, "dof {dof} t {t}: {p} vs {o}");
            }
        }
    }

    #[test]
    fn kappa_cases() {
        let same = ["a", "b", "a"];
        let r = agreement(&same, &same).unwrap();
        assert_eq!((r.percent, r.kappa), (1.0, 1.0));

        // 20 yes/yes, 20 yes/no, 20 no/yes, 20 no/no
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (x, y) in [("y", "y"), ("y", "n"), ("n", "y"), ("n", "n")] {
            a.extend([x; 20]);
            b.extend([y; 20]);
        }
        let r = agreement(&a, &b).unwrap();
        assert_eq!(r.percent, 0.5);
        assert!(r.kappa.abs() < 1e-12);

        let r = agreement(&["x", "x"], &["x", "x"]).unwrap();
        assert_eq!(r.kappa, 1.0);
        assert!(agreement(&["x"], &["x", "y"]).is_err());
    }

    #[test]
    fn bands() {
        assert_eq!(kappa_band(0.36), "fair agreement");
        assert_eq!(kappa_band(0.14), "slight agreement");
        assert_eq!(kappa_band(-0.1), "poor agreement");
    }

    #[test]
    fn sample_sd() {
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(m, 3.0);
        assert_relative_eq!(s, 2.5f64.sqrt(), epsilon = 1e-15);
    }
}
