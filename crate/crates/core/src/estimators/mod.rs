//! Monte Carlo estimators for the LFPP scaling quantities.
//!
//! Every estimator draws sample `i` from the field seeded by
//! `sample_seed(master, i)`, evaluates it on a worker pool and reduces the
//! results in sample order, so outputs do not depend on the worker count.

mod bilip;
mod events;
mod scaling;
mod stats;
mod subadditive;

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LfppError, Result};

pub use bilip::{bilip_compare, BilipConfig, BilipReport};
pub use events::{
    event_probability, multiscale_hit_probability, EventPlugIn, EventSample, EventStudy,
    ScaleLadder,
};
pub use scaling::{
    estimate_Q, estimate_a, estimate_a_cr, estimate_cr, gamma_from_Q, ratio_from_estimates,
    ratio_scan, RatioScan,
};
pub use stats::{bootstrap_indices, least_squares, lower_median, BOOTSTRAP_REPLICATES};
pub use subadditive::{minimal_slack, subadditive_rate, SubadditiveCertificate};

/// Sampling plan shared by all estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampling {
    pub samples: usize,
    /// Master seed; sample `i` uses `rng::sample_seed(seed, i)`.
    pub seed: u64,
    pub workers: usize,
    /// Digest of the configuration, copied into every record.
    pub config_hash: String,
}

impl Sampling {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed, workers: 1, config_hash: String::new() }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_hash(mut self, hash: impl Into<String>) -> Self {
        self.config_hash = hash.into();
        self
    }

    fn check(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(LfppError::Config("sample count must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(LfppError::Config("worker count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Parameter tuple of a record; unused entries are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Params {
    pub xi: Option<f64>,
    pub eps: Option<f64>,
    pub r: Option<f64>,
    pub zeta: Option<f64>,
    pub q: Option<f64>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
}

impl Params {
    pub fn xi(xi: f64) -> Self {
        Self { xi: Some(xi), ..Self::default() }
    }

    pub fn eps(self, eps: f64) -> Self {
        Self { eps: Some(eps), ..self }
    }

    pub fn r(self, r: f64) -> Self {
        Self { r: Some(r), ..self }
    }

    pub fn zeta(self, zeta: f64) -> Self {
        Self { zeta: Some(zeta), ..self }
    }

    pub fn q(self, q: f64) -> Self {
        Self { q: Some(q), ..self }
    }

    pub fn c(self, c: f64) -> Self {
        Self { c: Some(c), ..self }
    }
}

/// A named estimate with its 90% bootstrap interval and provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRecord {
    pub quantity: String,
    #[serde(flatten)]
    pub params: Params,
    pub estimate: f64,
    pub lo90: f64,
    pub hi90: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub config_hash: String,
    /// Per-sample values in sample order; empty for derived quantities.
    #[serde(skip)]
    pub samples: Vec<f64>,
}

pub const CSV_HEADER: &str =
    "quantity,xi,eps,r,zeta,q,C,estimate,lo90,hi90,n_samples,seed,config_hash";

impl EstimateRecord {
    /// Lower median of `samples` with a bootstrap interval. Also the hook
    /// for injecting sample values directly.
    pub fn from_samples(
        quantity: &str,
        params: Params,
        samples: Vec<f64>,
        seed: u64,
        config_hash: &str,
    ) -> Result<Self> {
        Self::from_statistic(quantity, params, samples, seed, config_hash, lower_median)
    }

    /// Sample mean of 0/1 indicators with a bootstrap interval.
    pub fn from_indicators(
        quantity: &str,
        params: Params,
        hits: &[bool],
        seed: u64,
        config_hash: &str,
    ) -> Result<Self> {
        let values = hits.iter().map(|&h| if h { 1.0 } else { 0.0 }).collect();
        Self::from_statistic(quantity, params, values, seed, config_hash, |v| {
            v.iter().sum::<f64>() / v.len() as f64
        })
    }

    fn from_statistic(
        quantity: &str,
        params: Params,
        samples: Vec<f64>,
        seed: u64,
        config_hash: &str,
        stat: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(LfppError::Argument(format!("{quantity}: no samples")));
        }
        let estimate = stat(&samples);
        let mut reps: Vec<f64> = bootstrap_indices(seed, samples.len())
            .iter()
            .map(|idx| stat(&idx.iter().map(|&k| samples[k]).collect::<Vec<_>>()))
            .collect();
        let (lo, hi) = stats::percentile_interval(&mut reps);
        Ok(Self {
            quantity: quantity.to_string(),
            params,
            estimate,
            lo90: lo.min(estimate),
            hi90: hi.max(estimate),
            n_samples: samples.len(),
            seed,
            config_hash: config_hash.to_string(),
            samples,
        })
    }

    /// Record for a derived quantity with an externally computed interval.
    pub fn derived(
        quantity: &str,
        params: Params,
        estimate: f64,
        interval: (f64, f64),
        n_samples: usize,
        seed: u64,
        config_hash: &str,
    ) -> Self {
        Self {
            quantity: quantity.to_string(),
            params,
            estimate,
            lo90: interval.0.min(estimate),
            hi90: interval.1.max(estimate),
            n_samples: n_samples.max(1),
            seed,
            config_hash: config_hash.to_string(),
            samples: Vec::new(),
        }
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let p = &self.params;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.quantity,
            opt(p.xi),
            opt(p.eps),
            opt(p.r),
            opt(p.zeta),
            opt(p.q),
            opt(p.c),
            self.estimate,
            self.lo90,
            self.hi90,
            self.n_samples,
            self.seed,
            self.config_hash
        )
    }

    pub fn json_line(&self) -> String {
        // Non-finite numbers have no JSON form; they become null.
        serde_json::to_string(self).expect("record serialises")
    }
}

pub fn write_csv(records: &[EstimateRecord], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

pub fn write_json_lines(records: &[EstimateRecord], out: &mut impl Write) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{}", r.json_line())?;
    }
    Ok(())
}

/// Evaluates `f(0..count)` on `workers` threads and returns the results in
/// index order. The reported error is the one with the smallest index.
pub fn parallel_map<T, F>(workers: usize, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let results: Vec<Result<T>> = if workers <= 1 {
        (0..count).map(&f).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| LfppError::Config(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..count).into_par_iter().map(&f).collect())
    };
    results.into_iter().collect()
}
