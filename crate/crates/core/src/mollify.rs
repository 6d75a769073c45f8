//! Heat-kernel mollification.
//!
//! [`mollify`] convolves with the sampled heat kernel
//! `p_{eps^2/2}(z) = exp(-|z|^2 / eps^2) / (pi eps^2)` on the torus via FFT.
//! [`mollify_truncated`] multiplies the same discrete kernel by a radial bump
//! supported in `B_{eps (log 1/eps)^q}` and divides by the retained mass
//! `Z_eps`, so every output value depends only on nearby input values.
//!
//! In both cases the discrete kernel is first renormalised to unit mass.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{LfppError, Result};
use crate::fft::Fft2;
use crate::gff::{GridField, SpectralSample};

/// Default truncation exponent `q`.
pub const DEFAULT_Q: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MollifierKind {
    Full,
    Truncated,
}

/// A mollified field and the parameters that produced it.
#[derive(Debug, Clone)]
pub struct MollifiedField {
    pub base: GridField,
    pub epsilon: f64,
    pub kind: MollifierKind,
    /// Truncation exponent; `None` for the full mollifier.
    pub q: Option<f64>,
    /// Retained kernel mass; exactly 1 for the full mollifier.
    pub z_eps: f64,
}

impl MollifiedField {
    /// Wraps an arbitrary field as if it were fully mollified at `epsilon`.
    /// Used for handcrafted test fields.
    pub fn unmollified(base: GridField, epsilon: f64) -> Self {
        Self { base, epsilon, kind: MollifierKind::Full, q: None, z_eps: 1.0 }
    }

    /// Same mollified field shifted by the constant `c`.
    pub fn add_constant(&self, c: f64) -> Self {
        Self { base: self.base.add_constant(c), ..self.clone() }
    }
}

fn check_resolution(eps: f64, mesh: f64) -> Result<()> {
    if !(eps.is_finite() && eps >= 3.0 * mesh * (1.0 - 1e-12)) {
        return Err(LfppError::Resolution(format!(
            "mollification scale {eps} is below three lattice spacings ({})",
            3.0 * mesh
        )));
    }
    Ok(())
}

/// Unit-mass 1-D Gaussian factor `exp(-d^2/eps^2)` on `n` torus points, with
/// `d` the minimal-image displacement.
///
/// The 2-D kernel is the outer product of this factor with itself.
fn gaussian_factor_torus(eps: f64, mesh: f64, n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..n)
        .map(|k| {
            let d = crate::fft::signed_frequency(k, n) as f64 * mesh;
            (-(d * d) / (eps * eps)).exp()
        })
        .collect();
    let total: f64 = g.iter().sum();
    g.iter_mut().for_each(|v| *v /= total);
    g
}

/// Mass of the same 1-D factor summed over the whole integer lattice.
fn gaussian_mass_line(eps: f64, mesh: f64) -> f64 {
    let reach = (40.0 * eps / mesh).ceil() as i64;
    let mut total = 1.0;
    for k in 1..=reach {
        let d = k as f64 * mesh;
        total += 2.0 * (-(d * d) / (eps * eps)).exp();
    }
    total
}

/// DFT of the unit-mass torus kernel factor (real, since it is even).
fn gaussian_factor_spectrum(eps: f64, mesh: f64, n: usize) -> Vec<f64> {
    let g = gaussian_factor_torus(eps, mesh, n);
    let mut buf: Vec<Complex64> = g.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.iter().map(|c| c.re).collect()
}

/// Circular convolution of `f` with the unit-mass sampled heat kernel.
pub fn mollify(f: &GridField, eps: f64) -> Result<MollifiedField> {
    check_resolution(eps, f.mesh())?;
    let n = f.n();
    let spec = gaussian_factor_spectrum(eps, f.mesh(), n);
    let fft = Fft2::new(n);
    let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.forward_transposed(&mut buf);
    let scale = 1.0 / (n * n) as f64;
    for kx in 0..n {
        for ky in 0..n {
            buf[kx * n + ky] *= spec[kx] * spec[ky] * scale;
        }
    }
    fft.inverse_from_transposed(&mut buf);
    let values = buf.iter().map(|c| c.re).collect();
    Ok(MollifiedField {
        base: GridField::new(n, f.length(), f.origin(), values)?,
        epsilon: eps,
        kind: MollifierKind::Full,
        q: None,
        z_eps: 1.0,
    })
}

/// [`mollify`] applied to a freshly synthesised field, reusing its spectral
/// coefficients (one inverse transform instead of a forward/inverse pair).
pub fn mollify_spectral(sample: &SpectralSample, eps: f64) -> Result<MollifiedField> {
    let f = &sample.field;
    check_resolution(eps, f.mesh())?;
    let n = f.n();
    let spec = gaussian_factor_spectrum(eps, f.mesh(), n);
    let mut buf = sample.coeffs.clone();
    for kx in 0..n {
        for ky in 0..n {
            buf[kx * n + ky] *= spec[kx] * spec[ky];
        }
    }
    Fft2::new(n).inverse_from_transposed(&mut buf);
    let values = buf.iter().map(|c| c.re - sample.shift).collect();
    Ok(MollifiedField {
        base: GridField::new(n, f.length(), f.origin(), values)?,
        epsilon: eps,
        kind: MollifierKind::Full,
        q: None,
        z_eps: 1.0,
    })
}

/// Radius `eps (log 1/eps)^q` outside which the truncated kernel vanishes.
pub fn support_radius(eps: f64, q: f64) -> f64 {
    eps * (1.0 / eps).ln().powf(q)
}

/// Radial bump: 1 up to `radius / 2`, 0 from `radius` on, quintic
/// smoothstep in between.
pub fn bump(rho: f64, radius: f64) -> f64 {
    let half = 0.5 * radius;
    if rho <= half {
        1.0
    } else if rho >= radius {
        0.0
    } else {
        let t = (rho - half) / half;
        1.0 - t * t * t * (t * (6.0 * t - 15.0) + 10.0)
    }
}

/// Finite-support kernel `psi_eps * p_{eps^2/2}` (unit-mass normalised).
#[derive(Debug, Clone)]
pub struct TruncatedKernel {
    pub epsilon: f64,
    pub q: f64,
    pub radius: f64,
    /// `(di, dj, weight)` for every lattice offset inside the support.
    pub taps: Vec<(isize, isize, f64)>,
    /// Sum of the tap weights.
    pub z_eps: f64,
}

impl TruncatedKernel {
    pub fn new(eps: f64, q: f64, mesh: f64) -> Result<Self> {
        check_resolution(eps, mesh)?;
        if !(q > 0.0 && q.is_finite()) {
            return Err(LfppError::Argument(format!("truncation exponent {q} must be positive")));
        }
        if !(eps < 1.0) {
            return Err(LfppError::Argument(format!(
                "truncated mollifier needs eps < 1, got {eps}"
            )));
        }
        let radius = support_radius(eps, q);
        let reach = (radius / mesh).floor() as isize;
        let norm = gaussian_mass_line(eps, mesh);
        let norm = norm * norm;
        let mut taps = Vec::new();
        let mut z_eps = 0.0;
        for dj in -reach..=reach {
            for di in -reach..=reach {
                let (dx, dy) = (di as f64 * mesh, dj as f64 * mesh);
                let rho = (dx * dx + dy * dy).sqrt();
                let psi = bump(rho, radius);
                if psi > 0.0 {
                    let w = psi * (-(rho * rho) / (eps * eps)).exp() / norm;
                    taps.push((di, dj, w));
                    z_eps += w;
                }
            }
        }
        Ok(Self { epsilon: eps, q, radius, taps, z_eps })
    }
}

/// `Z_eps`: mass of the discrete kernel kept by the bump.
pub fn truncation_mass(eps: f64, q: f64, mesh: f64) -> Result<f64> {
    Ok(TruncatedKernel::new(eps, q, mesh)?.z_eps)
}

/// `Z_eps^{-1} (f * psi_eps p_{eps^2/2})` by direct summation over the
/// kernel support, with periodic indexing.
pub fn mollify_truncated(f: &GridField, eps: f64, q: f64) -> Result<MollifiedField> {
    let kernel = TruncatedKernel::new(eps, q, f.mesh())?;
    if !(kernel.radius < 0.25 * f.length()) {
        return Err(LfppError::Resolution(format!(
            "truncated kernel radius {} exceeds a quarter of the domain ({})",
            kernel.radius,
            0.25 * f.length()
        )));
    }
    let n = f.n();
    let src = f.values();
    let mut out = vec![0.0; n * n];
    // Row-wise accumulation, one tap at a time; every output sums its taps
    // in the same order, which keeps results independent of far values.
    for j in 0..n {
        for &(di, dj, w) in &kernel.taps {
            let shift_i = di.rem_euclid(n as isize) as usize;
            let sj = (j as isize + dj).rem_euclid(n as isize) as usize;
            let src_row = &src[sj * n..(sj + 1) * n];
            let dst_row = &mut out[j * n..(j + 1) * n];
            let split = n - shift_i;
            for (d, s) in dst_row[..split].iter_mut().zip(&src_row[shift_i..]) {
                *d += w * s;
            }
            for (d, s) in dst_row[split..].iter_mut().zip(&src_row[..shift_i]) {
                *d += w * s;
            }
        }
    }
    let inv = 1.0 / kernel.z_eps;
    out.iter_mut().for_each(|v| *v *= inv);
    Ok(MollifiedField {
        base: GridField::new(n, f.length(), f.origin(), out)?,
        epsilon: eps,
        kind: MollifierKind::Truncated,
        q: Some(q),
        z_eps: kernel.z_eps,
    })
}
