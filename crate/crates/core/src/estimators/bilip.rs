//! Two-resolution comparison of ball-to-ball and point-to-point distances.

use rand::Rng;

use crate::error::{LfppError, Result};
use crate::gff::{sample_spectral, SamplerConfig};
use crate::metric::{ball_to_ball, RegionMask, WeightedGrid};
use crate::mollify::mollify_spectral;
use crate::rng::{sample_seed, stream, PAIR_STREAM};

use super::scaling::{check_eps, crop_mollified};
use super::stats::lower_median;
use super::{parallel_map, EstimateRecord, Params, Sampling};

#[derive(Debug, Clone, PartialEq)]
pub struct BilipConfig {
    pub xi: f64,
    pub eps_coarse: f64,
    pub eps_fine: f64,
    pub zeta: f64,
    /// Ball radius; defaults to `eps_coarse^(1-zeta)`.
    pub radius: Option<f64>,
    /// Centre and side of the square region `U`.
    pub region_center: [f64; 2],
    pub region_side: f64,
    /// Point pairs drawn per field sample.
    pub pairs: usize,
    /// Plug-in crossing constants for the two scales.
    pub a_coarse: f64,
    pub a_fine: f64,
}

impl BilipConfig {
    pub fn ball_radius(&self) -> f64 {
        self.radius.unwrap_or_else(|| self.eps_coarse.powf(1.0 - self.zeta))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilipReport {
    /// Coarse balls over fine points, both normalised.
    pub upper_ratios: Vec<f64>,
    /// Fine balls over coarse points, both normalised.
    pub lower_ratios: Vec<f64>,
    pub pairs_used: usize,
    /// Pairs closer than three ball radii.
    pub pairs_skipped: usize,
    /// Largest ratio of either family.
    pub c0: f64,
    /// Medians and 90% quantiles of the two families.
    pub upper_median: f64,
    pub upper_q90: f64,
    pub lower_median: f64,
    pub lower_q90: f64,
    /// `c0` as a record, with a bootstrap interval over field samples.
    pub record: EstimateRecord,
}

struct SampleRatios {
    upper: Vec<f64>,
    lower: Vec<f64>,
    skipped: usize,
}

fn quantile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v[((v.len() - 1) as f64 * p).round() as usize]
}

fn measure(bc: &BilipConfig, cfg: &SamplerConfig, seed: u64) -> Result<SampleRatios> {
    let sample = sample_spectral(&cfg.with_seed(seed))?;
    let rho = bc.ball_radius();
    let half = 0.5 * bc.region_side;
    let reach = half * std::f64::consts::SQRT_2 + rho;
    let coarse = WeightedGrid::new(&crop_mollified(&mollify_spectral(&sample, bc.eps_coarse)?, reach)?, bc.xi)?;
    let fine = if bc.eps_fine == bc.eps_coarse {
        coarse.clone()
    } else {
        WeightedGrid::new(&crop_mollified(&mollify_spectral(&sample, bc.eps_fine)?, reach)?, bc.xi)?
    };
    let u_coarse = RegionMask::square(coarse.lattice(), bc.region_center, bc.region_side);
    let u_fine = RegionMask::square(fine.lattice(), bc.region_center, bc.region_side);
    let mut rng = stream(seed, PAIR_STREAM);
    // Keep points one mesh inside U so their nearest lattice points are in U.
    let inner = half - cfg.mesh();
    let mut draw = || {
        let c = bc.region_center;
        [c[0] + rng.random_range(-inner..=inner), c[1] + rng.random_range(-inner..=inner)]
    };
    let mut out = SampleRatios { upper: Vec::new(), lower: Vec::new(), skipped: 0 };
    for _ in 0..bc.pairs {
        let (z, w) = (draw(), draw());
        if ((z[0] - w[0]).powi(2) + (z[1] - w[1]).powi(2)).sqrt() < 3.0 * rho {
            out.skipped += 1;
            continue;
        }
        let coarse_ball = ball_to_ball(&coarse, z, w, rho, &u_coarse)?.value / bc.a_coarse;
        let coarse_point = ball_to_ball(&coarse, z, w, 0.0, &u_coarse)?.value / bc.a_coarse;
        let fine_ball = ball_to_ball(&fine, z, w, rho, &u_fine)?.value / bc.a_fine;
        let fine_point = ball_to_ball(&fine, z, w, 0.0, &u_fine)?.value / bc.a_fine;
        out.upper.push(coarse_ball / fine_point);
        out.lower.push(fine_ball / coarse_point);
    }
    Ok(out)
}

/// Empirical distortion constant between the coarse and fine metrics.
pub fn bilip_compare(bc: &BilipConfig, cfg: &SamplerConfig, s: &Sampling) -> Result<BilipReport> {
    s.check()?;
    cfg.validate()?;
    check_eps(bc.eps_coarse, cfg)?;
    check_eps(bc.eps_fine, cfg)?;
    if bc.eps_fine != bc.eps_coarse && bc.eps_fine > bc.eps_coarse / 4.0 {
        return Err(LfppError::Config(format!(
            "eps_fine = {} must be at most eps_coarse / 4",
            bc.eps_fine
        )));
    }
    if !(bc.zeta > 0.0 && bc.zeta < 1.0) || !(bc.region_side > 0.0) || bc.pairs == 0 {
        return Err(LfppError::Config("need zeta in (0, 1), a positive region and pairs >= 1".into()));
    }
    if !(bc.a_coarse > 0.0 && bc.a_fine > 0.0) {
        return Err(LfppError::Config("crossing constants must be positive".into()));
    }
    let reach = 0.5 * bc.region_side * std::f64::consts::SQRT_2 + bc.ball_radius();
    if reach + 4.0 * cfg.mesh() > 0.5 * cfg.length {
        return Err(LfppError::Config("region U leaves the domain".into()));
    }
    let per_sample = parallel_map(s.workers, s.samples, |i| measure(bc, cfg, sample_seed(s.seed, i as u64)))?;
    let upper: Vec<f64> = per_sample.iter().flat_map(|p| p.upper.iter().copied()).collect();
    let lower: Vec<f64> = per_sample.iter().flat_map(|p| p.lower.iter().copied()).collect();
    let skipped = per_sample.iter().map(|p| p.skipped).sum();
    if upper.is_empty() {
        return Err(LfppError::Geometry("every point pair was closer than three ball radii".into()));
    }
    let sample_max: Vec<f64> = per_sample
        .iter()
        .map(|p| p.upper.iter().chain(&p.lower).copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let c0 = sample_max.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let params = Params::xi(bc.xi).eps(bc.eps_coarse).zeta(bc.zeta);
    let record = EstimateRecord::from_statistic(
        "bilip_C0",
        params,
        sample_max,
        s.seed,
        &s.config_hash,
        |v| v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )?;
    Ok(BilipReport {
        pairs_used: upper.len(),
        pairs_skipped: skipped,
        c0,
        upper_median: lower_median(&upper),
        upper_q90: quantile(&upper, 0.9),
        lower_median: lower_median(&lower),
        lower_q90: quantile(&lower, 0.9),
        upper_ratios: upper,
        lower_ratios: lower,
        record,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> BilipConfig {
        BilipConfig {
            xi: 0.3,
            eps_coarse: 0.125,
            eps_fine: 0.125,
            zeta: 0.25,
            radius: Some(0.0),
            region_center: [0.0, 0.0],
            region_side: 1.0,
            pairs: 6,
            a_coarse: 1.0,
            a_fine: 1.0,
        }
    }

    #[test]
    fn identical_metrics_give_unit_ratios() {
        let cfg = SamplerConfig::new(256, 8.0, 0);
        let rep = bilip_compare(&base(), &cfg, &Sampling::new(2, 3)).unwrap();
        assert!(rep.upper_ratios.iter().chain(&rep.lower_ratios).all(|&r| r == 1.0));
        assert_eq!(rep.c0, 1.0);
    }

    #[test]
    fn separation_and_scale_preconditions() {
        let cfg = SamplerConfig::new(256, 8.0, 0);
        let bad = BilipConfig { eps_fine: 0.1, ..base() };
        assert!(matches!(bilip_compare(&bad, &cfg, &Sampling::new(1, 1)), Err(LfppError::Config(_))));
        let wide = BilipConfig { radius: Some(0.4), pairs: 20, ..base() };
        let rep = bilip_compare(&wide, &cfg, &Sampling::new(1, 1));
        if let Ok(rep) = rep {
            assert!(rep.pairs_skipped > 0);
            assert_eq!(rep.pairs_used + rep.pairs_skipped, 20);
        }
    }
}
