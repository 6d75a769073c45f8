//! Rate extraction for approximately additive sequences.

use serde::Serialize;

use crate::error::{LfppError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubadditiveCertificate {
    /// `x_N / N` for the last index `N`.
    pub alpha: f64,
    pub n_max: usize,
    /// Slack supplied by the caller.
    pub c: f64,
    /// Smallest slack for which the two-sided condition holds.
    pub minimal_c: f64,
    /// Pair `(n, m)` attaining `minimal_c`, if any pair exists.
    pub worst_pair: Option<(usize, usize)>,
    /// Whether the condition holds with the supplied `c`.
    pub condition_holds: bool,
    /// Whether `|x_n / n - alpha| <= 2 c' / n` for every `n`, where `c'` is
    /// the supplied `c` if it is feasible and `minimal_c` otherwise.
    pub bound_holds: bool,
}

/// `max |x_{n+m} - x_n - x_m|` over `n + m <= N`, with `x[k]` holding
/// `x_{k+1}`.
pub fn minimal_slack(x: &[f64]) -> (f64, Option<(usize, usize)>) {
    let big_n = x.len();
    let mut best = 0.0;
    let mut pair = None;
    for n in 1..big_n {
        for m in n..=big_n - n {
            let gap = (x[n + m - 1] - x[n - 1] - x[m - 1]).abs();
            if pair.is_none() || gap > best {
                best = gap;
                pair = Some((n, m));
            }
        }
    }
    (best, pair)
}

/// Checks `x_n + x_m - c <= x_{n+m} <= x_n + x_m + c` on all in-range
/// pairs and returns `alpha = x_N / N` with its certificate.
pub fn subadditive_rate(x: &[f64], c: f64) -> Result<SubadditiveCertificate> {
    if x.len() < 2 {
        return Err(LfppError::Argument("sequence needs at least two terms".into()));
    }
    if !(c >= 0.0) {
        return Err(LfppError::Argument(format!("slack c = {c} must be nonnegative")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(LfppError::Argument("sequence terms must be finite".into()));
    }
    let (minimal_c, worst_pair) = minimal_slack(x);
    let condition_holds = minimal_c <= c;
    let slack = if condition_holds { c } else { minimal_c };
    let n_max = x.len();
    let alpha = x[n_max - 1] / n_max as f64;
    let bound_holds = x
        .iter()
        .enumerate()
        .all(|(k, v)| (v / (k + 1) as f64 - alpha).abs() <= 2.0 * slack / (k + 1) as f64 + 1e-12);
    Ok(SubadditiveCertificate { alpha, n_max, c, minimal_c, worst_pair, condition_holds, bound_holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_additive() {
        let x: Vec<f64> = (1..=20).map(|n| 3.0 * n as f64).collect();
        let cert = subadditive_rate(&x, 0.0).unwrap();
        assert_eq!(cert.alpha, 3.0);
        assert_eq!(cert.minimal_c, 0.0);
        assert!(cert.condition_holds && cert.bound_holds);
    }

    #[test]
    fn infeasible_slack_is_reported() {
        let x: Vec<f64> = (1..=10).map(|n| (n * n) as f64).collect();
        let cert = subadditive_rate(&x, 1.0).unwrap();
        assert!(!cert.condition_holds);
        assert!(cert.minimal_c > 1.0);
        assert!(subadditive_rate(&x[..1], 0.0).is_err());
    }
}
