//! Crossing constants, the distance exponent and the annulus constants.

#![allow(non_snake_case)]

use crate::error::{LfppError, Result};
use crate::gff::{circle_average, sample_spectral, SamplerConfig};
use crate::metric::{around_annulus, crossing_distance, AnnulusSpec, Square, WeightedGrid};
use crate::mollify::{mollify_spectral, MollifiedField};
use crate::rng::sample_seed;

use super::events::ScaleLadder;
use super::stats::{bootstrap_indices, least_squares, lower_median, percentile_interval};
use super::{parallel_map, EstimateRecord, Params, Sampling};

/// One per-sample measurement.
#[derive(Debug, Clone, Copy)]
enum Job {
    /// Left-right crossing of the centred square of side `side` under
    /// `D^eps`, multiplied by `exp(-xi h_side) / side` when `side < 1`
    /// (the crossing constant at scale `eps / side`).
    Crossing { eps: f64, side: f64 },
    /// `exp(-xi h_r) D^eps(around A_{r,2r})`.
    Around { eps: f64, r: f64 },
}

impl Job {
    fn eps(&self) -> f64 {
        match *self {
            Job::Crossing { eps, .. } | Job::Around { eps, .. } => eps,
        }
    }

    /// Radius of the centred disc the measurement reads.
    fn reach(&self) -> f64 {
        match *self {
            Job::Crossing { side, .. } => 0.5 * side,
            Job::Around { r, .. } => 2.0 * r,
        }
    }
}

pub(crate) fn check_eps(eps: f64, cfg: &SamplerConfig) -> Result<()> {
    if !(eps.is_finite() && eps >= 3.0 * cfg.mesh() * (1.0 - 1e-12)) {
        return Err(LfppError::Config(format!(
            "eps = {eps} is below three lattice spacings ({})",
            3.0 * cfg.mesh()
        )));
    }
    Ok(())
}

fn validate_jobs(jobs: &[Job], cfg: &SamplerConfig) -> Result<()> {
    cfg.validate()?;
    let mesh = cfg.mesh();
    for job in jobs {
        check_eps(job.eps(), cfg)?;
        match *job {
            Job::Crossing { side, .. } => {
                if !(side > 0.0 && side <= 1.0) {
                    return Err(LfppError::Config(format!("square side {side} outside (0, 1]")));
                }
                if side < 16.0 * mesh * (1.0 - 1e-12) {
                    return Err(LfppError::Config(format!(
                        "square side {side} is below 16 lattice spacings"
                    )));
                }
            }
            Job::Around { eps, r } => {
                if !(r > 0.0 && 2.0 * r <= 0.25 * cfg.length) {
                    return Err(LfppError::Config(format!(
                        "annulus A_(r,2r) with r = {r} leaves the central region"
                    )));
                }
                if eps > r / 8.0 * (1.0 + 1e-12) {
                    return Err(LfppError::Config(format!(
                        "fine scale {eps} is coarser than r / 8 = {}",
                        r / 8.0
                    )));
                }
                if r < 8.0 * mesh * (1.0 - 1e-12) {
                    return Err(LfppError::Config(format!(
                        "annulus width {r} is below 8 lattice spacings"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Centred crop of a mollified field holding the disc of radius `reach`.
pub(crate) fn crop_mollified(m: &MollifiedField, reach: f64) -> Result<MollifiedField> {
    let mesh = m.base.mesh();
    Ok(MollifiedField { base: m.base.crop_center(reach + 2.0 * mesh)?, ..m.clone() })
}

/// Distinct values in first-appearance order.
pub(crate) fn distinct(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        if !out.iter().any(|u| u.to_bits() == v.to_bits()) {
            out.push(v);
        }
    }
    out
}

fn measure(xi: f64, jobs: &[Job], cfg: &SamplerConfig, seed: u64) -> Result<Vec<f64>> {
    let sample = sample_spectral(&cfg.with_seed(seed))?;
    let center = sample.field.center();
    let mut out = vec![0.0; jobs.len()];
    for eps in distinct(jobs.iter().map(Job::eps)) {
        let reach = jobs
            .iter()
            .filter(|j| j.eps() == eps)
            .map(Job::reach)
            .fold(0.0, f64::max);
        let phi = crop_mollified(&mollify_spectral(&sample, eps)?, reach)?;
        let grid = WeightedGrid::new(&phi, xi)?;
        for (k, job) in jobs.iter().enumerate() {
            if job.eps() != eps {
                continue;
            }
            out[k] = match *job {
                Job::Crossing { side, .. } => {
                    let d = crossing_distance(&grid, Square { center, side })?.value;
                    if side == 1.0 {
                        d
                    } else {
                        let h = circle_average(&sample.field, center, side)?;
                        d * (-xi * h).exp() / side
                    }
                }
                Job::Around { r, .. } => {
                    let h = circle_average(&sample.field, center, r)?;
                    let a = AnnulusSpec::new(center, r, 2.0 * r)?;
                    (-xi * h).exp() * around_annulus(&grid, &a)?.value
                }
            };
        }
    }
    Ok(out)
}

/// Values `[job][sample]`.
fn run_jobs(xi: f64, jobs: &[Job], cfg: &SamplerConfig, s: &Sampling) -> Result<Vec<Vec<f64>>> {
    s.check()?;
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(LfppError::Config(format!("xi = {xi} must be positive")));
    }
    validate_jobs(jobs, cfg)?;
    let per_sample =
        parallel_map(s.workers, s.samples, |i| measure(xi, jobs, cfg, sample_seed(s.seed, i as u64)))?;
    Ok((0..jobs.len()).map(|k| per_sample.iter().map(|v| v[k]).collect()).collect())
}

/// Median left-right crossing length of the unit square, one record per
/// `eps`.
pub fn estimate_a(xi: f64, eps: &[f64], cfg: &SamplerConfig, s: &Sampling) -> Result<Vec<EstimateRecord>> {
    Ok(estimate_a_cr(xi, eps, &[], 0.0, cfg, s)?.0)
}

/// `c_r`: median of `exp(-xi h_r) D(around A_{r,2r})` with the fine LFPP
/// metric at `eps_fine` standing in for the limit.
pub fn estimate_cr(
    xi: f64,
    radii: &[f64],
    eps_fine: f64,
    cfg: &SamplerConfig,
    s: &Sampling,
) -> Result<Vec<EstimateRecord>> {
    Ok(estimate_a_cr(xi, &[], radii, eps_fine, cfg, s)?.1)
}

/// [`estimate_a`] and [`estimate_cr`] on the same field samples.
pub fn estimate_a_cr(
    xi: f64,
    eps: &[f64],
    radii: &[f64],
    eps_fine: f64,
    cfg: &SamplerConfig,
    s: &Sampling,
) -> Result<(Vec<EstimateRecord>, Vec<EstimateRecord>)> {
    let mut jobs: Vec<Job> = eps.iter().map(|&e| Job::Crossing { eps: e, side: 1.0 }).collect();
    jobs.extend(radii.iter().map(|&r| Job::Around { eps: eps_fine, r }));
    let mut values = run_jobs(xi, &jobs, cfg, s)?.into_iter();
    let mut a = Vec::new();
    for &e in eps {
        let v = values.next().expect("one value list per job");
        a.push(EstimateRecord::from_samples("a_eps", Params::xi(xi).eps(e), v, s.seed, &s.config_hash)?);
    }
    let mut c = Vec::new();
    for &r in radii {
        let v = values.next().expect("one value list per job");
        c.push(EstimateRecord::from_samples(
            "c_r",
            Params::xi(xi).eps(eps_fine).r(r),
            v,
            s.seed,
            &s.config_hash,
        )?);
    }
    Ok((a, c))
}

fn q_from(eps: &[f64], a: &[f64], xi: f64) -> f64 {
    let x: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let y: Vec<f64> = a.iter().map(|v| v.ln()).collect();
    (1.0 - least_squares(&x, &y).0) / xi
}

/// `Q = (1 - s) / xi` with `s` the least-squares slope of `log a_eps`
/// against `log eps`.
///
/// When every record carries its samples and all share one sample count,
/// the interval comes from jointly resampling the samples; otherwise it is
/// the point estimate.
pub fn estimate_Q(records: &[EstimateRecord], xi: f64) -> Result<EstimateRecord> {
    let mut eps = Vec::new();
    for r in records {
        let e = r.params.eps.ok_or_else(|| LfppError::Argument("record without eps".into()))?;
        if !(r.estimate > 0.0 && r.estimate.is_finite()) {
            return Err(LfppError::Argument(format!("a_eps estimate {} is not positive", r.estimate)));
        }
        eps.push(e);
    }
    if distinct(eps.iter().copied()).len() < 3 {
        return Err(LfppError::Argument("estimating Q needs at least 3 distinct scales".into()));
    }
    let a: Vec<f64> = records.iter().map(|r| r.estimate).collect();
    let q = q_from(&eps, &a, xi);
    let n = records[0].samples.len();
    let seed = records[0].seed;
    let paired = n > 0 && records.iter().all(|r| r.samples.len() == n);
    let interval = if paired {
        let mut reps: Vec<f64> = bootstrap_indices(seed, n)
            .iter()
            .map(|idx| {
                let a_b: Vec<f64> = records
                    .iter()
                    .map(|r| lower_median(&idx.iter().map(|&k| r.samples[k]).collect::<Vec<_>>()))
                    .collect();
                q_from(&eps, &a_b, xi)
            })
            .collect();
        percentile_interval(&mut reps)
    } else {
        (q, q)
    };
    Ok(EstimateRecord::derived(
        "Q",
        Params::xi(xi),
        q,
        interval,
        n,
        seed,
        &records[0].config_hash,
    ))
}

/// The root `gamma in (0, 2]` of `Q = 2 / gamma + gamma / 2`.
pub fn gamma_from_Q(q: f64) -> Result<f64> {
    if !(q >= 2.0) {
        return Err(LfppError::Domain(format!(
            "Q = {q} < 2: supercritical regime, no real gamma (matter central charge in (1, 25))"
        )));
    }
    Ok(q - (q * q - 4.0).sqrt())
}

/// `r a_{eps/r} / (c_r a_eps)`.
pub fn ratio_from_estimates(r: f64, a_eps_over_r: f64, c_r: f64, a_eps: f64) -> f64 {
    r * a_eps_over_r / (c_r * a_eps)
}

/// Output of [`ratio_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct RatioScan {
    pub a_eps: EstimateRecord,
    /// `a_{eps/r}` per ladder radius, from crossings of the square of side
    /// `r` rescaled by `exp(-xi h_r) / r`.
    pub a_rescaled: Vec<EstimateRecord>,
    pub c_r: Vec<EstimateRecord>,
    pub rho: Vec<EstimateRecord>,
    /// `max rho / min rho` over the ladder.
    pub spread: f64,
}

/// `rho(eps, r)` for every ladder radius, all estimates sharing samples.
pub fn ratio_scan(
    xi: f64,
    ladder: &ScaleLadder,
    eps_fine: f64,
    cfg: &SamplerConfig,
    s: &Sampling,
) -> Result<RatioScan> {
    let eps = ladder.eps;
    let mut jobs = vec![Job::Crossing { eps, side: 1.0 }];
    for &r in &ladder.radii {
        jobs.push(Job::Crossing { eps, side: r });
        jobs.push(Job::Around { eps: eps_fine, r });
    }
    let values = run_jobs(xi, &jobs, cfg, s)?;
    let hash = &s.config_hash;
    let base = Params::xi(xi).eps(eps).zeta(ladder.zeta);
    let a_eps = EstimateRecord::from_samples("a_eps", Params::xi(xi).eps(eps), values[0].clone(), s.seed, hash)?;
    let idx = bootstrap_indices(s.seed, s.samples);
    let resampled = |v: &[f64], set: &[usize]| lower_median(&set.iter().map(|&k| v[k]).collect::<Vec<_>>());
    let (mut a_rescaled, mut c_r, mut rho) = (Vec::new(), Vec::new(), Vec::new());
    for (k, &r) in ladder.radii.iter().enumerate() {
        let ar = &values[1 + 2 * k];
        let cr = &values[2 + 2 * k];
        let a_rec = EstimateRecord::from_samples("a_eps_over_r", base.r(r), ar.clone(), s.seed, hash)?;
        let c_rec = EstimateRecord::from_samples("c_r", Params::xi(xi).eps(eps_fine).r(r), cr.clone(), s.seed, hash)?;
        let point = ratio_from_estimates(r, a_rec.estimate, c_rec.estimate, a_eps.estimate);
        let mut reps: Vec<f64> = idx
            .iter()
            .map(|set| ratio_from_estimates(r, resampled(ar, set), resampled(cr, set), resampled(&values[0], set)))
            .collect();
        let interval = percentile_interval(&mut reps);
        rho.push(EstimateRecord::derived("rho", base.r(r), point, interval, s.samples, s.seed, hash));
        a_rescaled.push(a_rec);
        c_r.push(c_rec);
    }
    let max = rho.iter().map(|r| r.estimate).fold(f64::NEG_INFINITY, f64::max);
    let min = rho.iter().map(|r| r.estimate).fold(f64::INFINITY, f64::min);
    Ok(RatioScan { a_eps, a_rescaled, c_r, rho, spread: max / min })
}
