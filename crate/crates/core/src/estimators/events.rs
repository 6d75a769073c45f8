//! The four-inequality comparison event and its multi-scale version.

use crate::error::{LfppError, Result};
use crate::gff::{circle_average, sample_spectral, SamplerConfig};
use crate::metric::{across_annulus, around_annulus, crossing_distance, AnnulusSpec, Square, WeightedGrid};
use crate::mollify::{mollify_spectral, mollify_truncated, support_radius, MollifiedField};
use crate::rng::sample_seed;

use super::scaling::{check_eps, crop_mollified};
use super::stats::lower_median;
use super::{parallel_map, EstimateRecord, Params, Sampling};

/// Radii `10^-j eps^(1-zeta)`, largest first.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleLadder {
    pub eps: f64,
    pub zeta: f64,
    pub radii: Vec<f64>,
}

impl ScaleLadder {
    /// Unclamped count `floor((zeta / 2) log10(1/eps)) - 10`; negative at
    /// any practical `eps`.
    pub fn paper_count(eps: f64, zeta: f64) -> i64 {
        (0.5 * zeta * (1.0 / eps).log10()).floor() as i64 - 10
    }

    /// The ladder with its count clamped to at least one radius.
    pub fn new(eps: f64, zeta: f64) -> Result<Self> {
        Self::check_params(eps, zeta)?;
        let count = Self::paper_count(eps, zeta).max(1);
        let top = eps.powf(1.0 - zeta);
        let radii = (0..count).map(|j| top * 10f64.powi(-(j as i32))).collect();
        Self::custom(eps, zeta, radii)
    }

    /// A user-chosen ladder, sorted largest first.
    pub fn custom(eps: f64, zeta: f64, mut radii: Vec<f64>) -> Result<Self> {
        Self::check_params(eps, zeta)?;
        if radii.is_empty() {
            return Err(LfppError::Argument("ladder needs at least one radius".into()));
        }
        radii.sort_by(|a, b| b.total_cmp(a));
        for &r in &radii {
            if !(r >= eps * (1.0 - 1e-12) && r <= 1.0) {
                return Err(LfppError::Argument(format!("ladder radius {r} outside [eps, 1]")));
            }
        }
        for w in radii.windows(2) {
            if w[0] < 10.0 * w[1] * (1.0 - 1e-12) {
                return Err(LfppError::Argument(format!(
                    "consecutive ladder radii {} and {} are closer than a factor 10",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { eps, zeta, radii })
    }

    /// Adds the radii `100 eps^(1-zeta) 10^k <= 1`.
    pub fn extended(&self) -> Result<Self> {
        let mut radii = self.radii.clone();
        let mut r = 100.0 * self.eps.powf(1.0 - self.zeta);
        while r <= 1.0 {
            radii.push(r);
            r *= 10.0;
        }
        Self::custom(self.eps, self.zeta, radii)
    }

    fn check_params(eps: f64, zeta: f64) -> Result<()> {
        if !(eps > 0.0 && eps < 1.0) || !(zeta > 0.0 && zeta < 1.0) {
            return Err(LfppError::Argument(format!(
                "ladder needs eps, zeta in (0, 1), got ({eps}, {zeta})"
            )));
        }
        Ok(())
    }
}

/// Plug-in constants for one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventPlugIn {
    pub c_r: f64,
    pub a_eps: f64,
    pub a_eps_over_r: f64,
}

/// Raw measurements at one radius for one field sample. `lim_*` use the
/// fine full-mollifier metric; `lfpp_*` the truncated metric at `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventSample {
    pub h_r: f64,
    /// Across `A_{r,2r}`.
    pub lim_across: f64,
    /// Around `A_{2r,3r}`.
    pub lim_around: f64,
    pub lfpp_across: f64,
    pub lfpp_around: f64,
    /// `exp(-xi h_r)` times the fine around distance of `A_{r,2r}`.
    pub c_sample: f64,
    /// Unit-square crossing under the full mollifier at `eps`.
    pub a_sample: f64,
    /// Crossing of the centred square of side `r`, times `exp(-xi h_r) / r`.
    pub a_rescaled_sample: f64,
}

impl EventSample {
    /// Whether the four inequalities hold with constant `c`.
    pub fn holds(&self, xi: f64, r: f64, plug: &EventPlugIn, c: f64) -> bool {
        let e = (xi * self.h_r).exp();
        let lim = plug.c_r * e;
        let lfpp = r * plug.a_eps_over_r / plug.a_eps * e;
        self.lim_across >= lim / c
            && self.lim_around <= c * lim
            && self.lfpp_across / plug.a_eps >= lfpp / c
            && self.lfpp_around / plug.a_eps <= c * lfpp
    }
}

/// Event measurements at several radii on a shared set of field samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EventStudy {
    pub xi: f64,
    pub eps: f64,
    pub q: f64,
    pub eps_fine: f64,
    pub radii: Vec<f64>,
    /// `[sample][radius]`.
    pub samples: Vec<Vec<EventSample>>,
    pub seed: u64,
    pub config_hash: String,
}

impl EventStudy {
    pub fn run(
        xi: f64,
        eps: f64,
        q: f64,
        eps_fine: f64,
        radii: &[f64],
        cfg: &SamplerConfig,
        s: &Sampling,
    ) -> Result<Self> {
        s.check()?;
        cfg.validate()?;
        check_eps(eps, cfg)?;
        check_eps(eps_fine, cfg)?;
        if !(xi > 0.0 && xi.is_finite()) || !(q > 0.0) {
            return Err(LfppError::Config(format!("need xi > 0 and q > 0, got ({xi}, {q})")));
        }
        if eps_fine > eps {
            return Err(LfppError::Config(format!(
                "fine scale {eps_fine} is coarser than eps = {eps}"
            )));
        }
        if radii.is_empty() {
            return Err(LfppError::Config("no radii".into()));
        }
        let support = support_radius(eps, q);
        for &r in radii {
            if !(r >= eps * (1.0 - 1e-12) && r <= 1.0) {
                return Err(LfppError::Config(format!("radius {r} outside [eps, 1]")));
            }
            if r < 16.0 * cfg.mesh() * (1.0 - 1e-12) {
                return Err(LfppError::Config(format!(
                    "radius {r} is below 16 lattice spacings"
                )));
            }
            if 3.0 * r + support + 4.0 * cfg.mesh() > 0.5 * cfg.length {
                return Err(LfppError::Config(format!("annulus A_(2r,3r) with r = {r} leaves the domain")));
            }
        }
        let samples = parallel_map(s.workers, s.samples, |i| {
            measure(xi, eps, q, eps_fine, radii, cfg, sample_seed(s.seed, i as u64))
        })?;
        Ok(Self {
            xi,
            eps,
            q,
            eps_fine,
            radii: radii.to_vec(),
            samples,
            seed: s.seed,
            config_hash: s.config_hash.clone(),
        })
    }

    /// Plug-in constants estimated from this study's own samples.
    pub fn plug_in(&self, k: usize) -> EventPlugIn {
        let col = |f: fn(&EventSample) -> f64| {
            lower_median(&self.samples.iter().map(|s| f(&s[k])).collect::<Vec<_>>())
        };
        EventPlugIn {
            c_r: col(|s| s.c_sample),
            a_eps: col(|s| s.a_sample),
            a_eps_over_r: col(|s| s.a_rescaled_sample),
        }
    }

    pub fn hits(&self, k: usize, plug: &EventPlugIn, c: f64) -> Vec<bool> {
        let r = self.radii[k];
        self.samples.iter().map(|s| s[k].holds(self.xi, r, plug, c)).collect()
    }

    fn params(&self, c: f64) -> Params {
        Params::xi(self.xi).eps(self.eps).q(self.q).c(c)
    }

    /// Fraction of samples on which the event at radius `k` holds.
    pub fn probability(&self, k: usize, plug: &EventPlugIn, c: f64) -> Result<EstimateRecord> {
        EstimateRecord::from_indicators(
            "event_probability",
            self.params(c).r(self.radii[k]),
            &self.hits(k, plug, c),
            self.seed,
            &self.config_hash,
        )
    }

    /// Fraction of samples on which the event holds at one or more of the
    /// radii `ks`.
    pub fn multiscale(&self, ks: &[usize], plugs: &[EventPlugIn], c: f64) -> Result<EstimateRecord> {
        if ks.is_empty() || ks.len() != plugs.len() {
            return Err(LfppError::Argument("one plug-in per ladder radius is required".into()));
        }
        let mut any = vec![false; self.samples.len()];
        for (&k, plug) in ks.iter().zip(plugs) {
            for (a, h) in any.iter_mut().zip(self.hits(k, plug, c)) {
                *a |= h;
            }
        }
        let smallest = ks.iter().map(|&k| self.radii[k]).fold(f64::INFINITY, f64::min);
        EstimateRecord::from_indicators(
            "multiscale_probability",
            self.params(c).r(smallest),
            &any,
            self.seed,
            &self.config_hash,
        )
    }
}

fn measure(
    xi: f64,
    eps: f64,
    q: f64,
    eps_fine: f64,
    radii: &[f64],
    cfg: &SamplerConfig,
    seed: u64,
) -> Result<Vec<EventSample>> {
    let sample = sample_spectral(&cfg.with_seed(seed))?;
    let center = sample.field.center();
    let rmax = radii.iter().copied().fold(0.0, f64::max);
    let grid = |m: MollifiedField| WeightedGrid::new(&m, xi);
    let fine = grid(crop_mollified(&mollify_spectral(&sample, eps_fine)?, 3.0 * rmax)?)?;
    let full = grid(crop_mollified(&mollify_spectral(&sample, eps)?, 0.5f64.max(0.5 * rmax))?)?;
    let support = support_radius(eps, q);
    let raw = sample.field.crop_center(3.0 * rmax + support + 2.0 * cfg.mesh())?;
    let local = grid(mollify_truncated(&raw, eps, q)?)?;
    let a_sample = crossing_distance(&full, Square::unit_at(center))?.value;
    radii
        .iter()
        .map(|&r| {
            let h_r = circle_average(&sample.field, center, r)?;
            let inner = AnnulusSpec::new(center, r, 2.0 * r)?;
            let outer = AnnulusSpec::new(center, 2.0 * r, 3.0 * r)?;
            let damp = (-xi * h_r).exp();
            Ok(EventSample {
                h_r,
                lim_across: across_annulus(&fine, &inner)?.value,
                lim_around: around_annulus(&fine, &outer)?.value,
                lfpp_across: across_annulus(&local, &inner)?.value,
                lfpp_around: around_annulus(&local, &outer)?.value,
                c_sample: damp * around_annulus(&fine, &inner)?.value,
                a_sample,
                a_rescaled_sample: damp / r
                    * crossing_distance(&full, Square { center, side: r })?.value,
            })
        })
        .collect()
}

/// Event probability at radius `r` for each constant in `cs`. Without
/// explicit plug-ins the constants are estimated from the same samples.
#[allow(clippy::too_many_arguments)]
pub fn event_probability(
    xi: f64,
    eps: f64,
    r: f64,
    cs: &[f64],
    q: f64,
    eps_fine: f64,
    plug: Option<EventPlugIn>,
    cfg: &SamplerConfig,
    s: &Sampling,
) -> Result<Vec<EstimateRecord>> {
    let study = EventStudy::run(xi, eps, q, eps_fine, &[r], cfg, s)?;
    let plug = plug.unwrap_or_else(|| study.plug_in(0));
    cs.iter().map(|&c| study.probability(0, &plug, c)).collect()
}

/// Probability that the event holds for at least one ladder radius.
#[allow(clippy::too_many_arguments)]
pub fn multiscale_hit_probability(
    xi: f64,
    ladder: &ScaleLadder,
    c: f64,
    q: f64,
    eps_fine: f64,
    plugs: Option<Vec<EventPlugIn>>,
    cfg: &SamplerConfig,
    s: &Sampling,
) -> Result<EstimateRecord> {
    let study = EventStudy::run(xi, ladder.eps, q, eps_fine, &ladder.radii, cfg, s)?;
    let ks: Vec<usize> = (0..ladder.radii.len()).collect();
    let plugs = plugs.unwrap_or_else(|| ks.iter().map(|&k| study.plug_in(k)).collect());
    let mut rec = study.multiscale(&ks, &plugs, c)?;
    rec.params.zeta = Some(ladder.zeta);
    Ok(rec)
}
