use rand::Rng;

use crate::rng::{stream, BOOTSTRAP_STREAM};

pub const BOOTSTRAP_REPLICATES: usize = 400;

/// Lower median: element `(n - 1) / 2` of the sorted values. `+inf`
/// sentinels sort last.
pub fn lower_median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty sample");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v[(v.len() - 1) / 2]
}

/// Resampling index sets for the bootstrap.
///
/// The sets depend only on `(seed, n)`, so estimates computed from the same
/// samples are resampled jointly.
pub fn bootstrap_indices(seed: u64, n: usize) -> Vec<Vec<usize>> {
    let mut rng = stream(seed, BOOTSTRAP_STREAM);
    (0..BOOTSTRAP_REPLICATES)
        .map(|_| (0..n).map(|_| rng.random_range(0..n)).collect())
        .collect()
}

/// 5% and 95% order statistics of the replicates.
pub(crate) fn percentile_interval(reps: &mut [f64]) -> (f64, f64) {
    reps.sort_by(f64::total_cmp);
    let last = (reps.len() - 1) as f64;
    (reps[(0.05 * last).round() as usize], reps[(0.95 * last).round() as usize])
}

/// Ordinary least-squares fit `y = slope * x + intercept`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
