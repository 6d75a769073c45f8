//! Log-correlated Gaussian fields on a periodic square lattice.
//!
//! Fields are synthesised spectrally on the `n x n` torus of side `L` with
//! covariance `sum_{m != 0} cos(2 pi m.(x-y)/L) / (2 pi |m|^2)`, which behaves
//! like `-log|x - y|` at short range. Each sample is shifted so that its
//! average over the unit circle around the domain centre vanishes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{LfppError, Result};
use crate::fft::{signed_frequency, Fft2};
use crate::rng;

/// Lattice geometry shared by fields, masks and weighted grids.
///
/// Lattice point `(i, j)` sits at `origin + (i, j) * mesh`; `i` indexes the
/// x axis and values are stored row-major as `j * n + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub n: usize,
    pub mesh: f64,
    pub origin: [f64; 2],
}

impl Lattice {
    pub fn length(&self) -> f64 {
        self.mesh * self.n as f64
    }

    pub fn center(&self) -> [f64; 2] {
        let half = 0.5 * self.length();
        [self.origin[0] + half, self.origin[1] + half]
    }

    pub fn position(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + i as f64 * self.mesh,
            self.origin[1] + j as f64 * self.mesh,
        ]
    }

    /// Fractional lattice coordinates of a plane point.
    pub fn coords(&self, p: [f64; 2]) -> [f64; 2] {
        [
            (p[0] - self.origin[0]) / self.mesh,
            (p[1] - self.origin[1]) / self.mesh,
        ]
    }

    /// Lattice point nearest to `p`, if it lies on the lattice.
    pub fn nearest(&self, p: [f64; 2]) -> Option<(usize, usize)> {
        let c = self.coords(p);
        let i = c[0].round();
        let j = c[1].round();
        let max = (self.n - 1) as f64;
        if (0.0..=max).contains(&i) && (0.0..=max).contains(&j) {
            Some((i as usize, j as usize))
        } else {
            None
        }
    }

    /// Whether the closed disc `B_r(z)` lies within the sampled square
    /// `[origin, origin + (n-1) mesh]^2`.
    pub fn contains_disc(&self, z: [f64; 2], r: f64) -> bool {
        let lo = self.coords([z[0] - r, z[1] - r]);
        let hi = self.coords([z[0] + r, z[1] + r]);
        let max = (self.n - 1) as f64;
        let tol = 1e-9;
        lo[0] >= -tol && lo[1] >= -tol && hi[0] <= max + tol && hi[1] <= max + tol
    }
}

/// A real scalar field sampled on a square lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    lattice: Lattice,
    values: Vec<f64>,
}

impl GridField {
    /// Builds a field, checking that `n` is a power of two, the mesh is
    /// positive and all values are finite.
    pub fn new(n: usize, length: f64, origin: [f64; 2], values: Vec<f64>) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(LfppError::Config(format!("lattice size {n} is not a power of two")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(LfppError::Config(format!("side length {length} must be positive")));
        }
        if values.len() != n * n {
            return Err(LfppError::Config(format!(
                "expected {} values, got {}",
                n * n,
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(LfppError::Config(format!("non-finite field value at index {k}")));
        }
        Ok(Self {
            lattice: Lattice { n, mesh: length / n as f64, origin },
            values,
        })
    }

    /// Field on `[-L/2, L/2)^2`, so the domain centre is the lattice point
    /// `(n/2, n/2)` at the plane origin.
    pub fn centered(n: usize, length: f64, values: Vec<f64>) -> Result<Self> {
        Self::new(n, length, [-0.5 * length, -0.5 * length], values)
    }

    /// Centred field with values `f(x, y)` at the lattice points.
    pub fn from_fn(n: usize, length: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let origin = [-0.5 * length, -0.5 * length];
        let mesh = length / n as f64;
        let mut values = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                values.push(f(origin[0] + i as f64 * mesh, origin[1] + j as f64 * mesh));
            }
        }
        Self::new(n, length, origin, values)
    }

    pub fn constant(n: usize, length: f64, c: f64) -> Result<Self> {
        Self::centered(n, length, vec![c; n * n])
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn n(&self) -> usize {
        self.lattice.n
    }

    pub fn length(&self) -> f64 {
        self.lattice.length()
    }

    pub fn mesh(&self) -> f64 {
        self.lattice.mesh
    }

    pub fn origin(&self) -> [f64; 2] {
        self.lattice.origin
    }

    pub fn center(&self) -> [f64; 2] {
        self.lattice.center()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.lattice.n + i]
    }

    /// Copy of the field with `c` added everywhere.
    pub fn add_constant(&self, c: f64) -> GridField {
        GridField {
            lattice: self.lattice,
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }

    /// Copy of the field with its values replaced by `f(value)`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GridField> {
        let values = self.values.iter().map(|&v| f(v)).collect();
        GridField::new(self.n(), self.length(), self.origin(), values)
    }

    /// Periodic `size x size` window starting at lattice point `(i0, j0)`.
    ///
    /// Indices wrap around the torus. The window keeps the plane coordinates
    /// of its points.
    pub fn crop(&self, i0: usize, j0: usize, size: usize) -> Result<GridField> {
        let n = self.n();
        if size > n {
            return Err(LfppError::Argument(format!("crop size {size} exceeds lattice size {n}")));
        }
        let mut values = Vec::with_capacity(size * size);
        for j in 0..size {
            let row = (j0 + j) % n;
            for i in 0..size {
                values.push(self.values[row * n + (i0 + i) % n]);
            }
        }
        let origin = self.lattice.position(i0, j0);
        GridField::new(size, size as f64 * self.mesh(), origin, values)
    }

    /// Centred window holding the disc of radius `radius` around the domain
    /// centre, with side a power of two.
    pub fn crop_center(&self, radius: f64) -> Result<GridField> {
        let n = self.n();
        let need = 2 * (radius / self.mesh()).ceil() as usize + 2;
        let size = need.next_power_of_two().max(2);
        if size >= n {
            return Ok(self.clone());
        }
        self.crop(n / 2 - size / 2, n / 2 - size / 2, size)
    }

    /// Bilinear interpolation at fractional lattice coordinates; callers
    /// guarantee `0 <= x, y <= n - 1`.
    fn bilinear(&self, x: f64, y: f64) -> f64 {
        let n = self.lattice.n;
        let i0 = (x.floor() as usize).min(n - 2);
        let j0 = (y.floor() as usize).min(n - 2);
        let tx = x - i0 as f64;
        let ty = y - j0 as f64;
        let v00 = self.get(i0, j0);
        let v10 = self.get(i0 + 1, j0);
        let v01 = self.get(i0, j0 + 1);
        let v11 = self.get(i0 + 1, j0 + 1);
        (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11)
    }
}

/// Configuration for [`sample_field`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n: usize,
    pub length: f64,
    pub seed: u64,
    /// Modes with `max(|m1|, |m2|)` above this index are dropped.
    pub spectral_cutoff: Option<usize>,
    /// Forces every spectral amplitude to zero (yields the zero field).
    pub amplitude_override: bool,
}

impl SamplerConfig {
    pub fn new(n: usize, length: f64, seed: u64) -> Self {
        Self { n, length, seed, spectral_cutoff: None, amplitude_override: false }
    }

    pub fn mesh(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || !self.n.is_power_of_two() {
            return Err(LfppError::Config(format!("lattice size {} is not a power of two", self.n)));
        }
        if !(self.length >= 8.0) || !self.length.is_finite() {
            return Err(LfppError::Config(format!(
                "side length {} must be at least 8",
                self.length
            )));
        }
        Ok(())
    }

    /// Same lattice, different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

/// A sampled field together with the spectral coefficients that produced it.
///
/// The field equals `Re(IDFT(coeffs)) - shift`; keeping the coefficients lets
/// the heat-kernel mollifier run as a single inverse transform per scale.
#[derive(Debug, Clone)]
pub struct SpectralSample {
    pub field: GridField,
    /// Coefficients in `[kx][ky]` layout.
    pub(crate) coeffs: Vec<Complex64>,
    /// Unit-circle average subtracted from the raw synthesis.
    pub shift: f64,
}

/// Spectral standard deviation of mode `(m1, m2)` for the real-part
/// synthesis: `Re(sum a_m e^{i k.x})` with `E|a_m|^2 = 1 / (pi |m|^2)` has the
/// covariance `sum cos(k.(x-y)) / (2 pi |m|^2)`.
fn mode_amplitude(m1: i64, m2: i64) -> f64 {
    let m2sum = (m1 * m1 + m2 * m2) as f64;
    if m2sum == 0.0 {
        0.0
    } else {
        1.0 / (PI * m2sum).sqrt()
    }
}

/// Draws one field; see the module docs for the covariance.
pub fn sample_field(cfg: &SamplerConfig) -> Result<GridField> {
    Ok(sample_spectral(cfg)?.field)
}

/// Like [`sample_field`], but also returns the spectral coefficients.
pub fn sample_spectral(cfg: &SamplerConfig) -> Result<SpectralSample> {
    cfg.validate()?;
    let n = cfg.n;
    let mut rng = rng::stream(cfg.seed, 0);
    let mut coeffs = vec![Complex64::default(); n * n];
    if !cfg.amplitude_override {
        let half = std::f64::consts::FRAC_1_SQRT_2;
        for kx in 0..n {
            let m1 = signed_frequency(kx, n);
            for ky in 0..n {
                let m2 = signed_frequency(ky, n);
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                let cut = cfg
                    .spectral_cutoff
                    .is_some_and(|c| m1.unsigned_abs().max(m2.unsigned_abs()) as usize > c);
                let amp = if cut { 0.0 } else { mode_amplitude(m1, m2) };
                coeffs[kx * n + ky] = Complex64::new(re * half * amp, im * half * amp);
            }
        }
    }
    let mut buf = coeffs.clone();
    Fft2::new(n).inverse_from_transposed(&mut buf);
    let values: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let raw = GridField::centered(n, cfg.length, values)?;
    let shift = circle_average(&raw, raw.center(), 1.0)?;
    let field = raw.add_constant(-shift);
    Ok(SpectralSample { field, coeffs, shift })
}

/// Number of quadrature points used for a circle of radius `r` at mesh `mesh`.
pub fn circle_points(r: f64, mesh: f64) -> usize {
    ((2.0 * PI * r / mesh).ceil() as usize).max(64)
}

/// Mean of bilinearly interpolated values at equispaced points on the circle
/// `|x - z| = r`.
pub fn circle_average(f: &GridField, z: [f64; 2], r: f64) -> Result<f64> {
    let lat = f.lattice();
    if !(r >= 2.0 * lat.mesh) {
        return Err(LfppError::Geometry(format!(
            "circle radius {r} below two lattice spacings ({})",
            2.0 * lat.mesh
        )));
    }
    if !lat.contains_disc(z, r) {
        return Err(LfppError::Geometry(format!(
            "circle of radius {r} around ({}, {}) leaves the field domain",
            z[0], z[1]
        )));
    }
    let m = circle_points(r, lat.mesh);
    let c = lat.coords(z);
    let rr = r / lat.mesh;
    let max = (lat.n - 1) as f64;
    let mut acc = 0.0;
    for k in 0..m {
        let theta = 2.0 * PI * k as f64 / m as f64;
        let x = (c[0] + rr * theta.cos()).clamp(0.0, max);
        let y = (c[1] + rr * theta.sin()).clamp(0.0, max);
        acc += f.bilinear(x, y);
    }
    Ok(acc / m as f64)
}

/// `u -> f(c + r (u - c)) - h_r(c)` for dyadic `r`, with `c` the domain
/// centre.
///
/// The lattice values are reused unchanged on a lattice of mesh `mesh / r`.
pub fn rescale_field(f: &GridField, r: f64) -> Result<GridField> {
    let m = -r.log2();
    if !(r > 0.0 && r <= 1.0) || m.fract() != 0.0 || (2.0f64).powi(-(m as i32)) != r {
        return Err(LfppError::Argument(format!("rescaling factor {r} is not a dyadic 2^-m")));
    }
    if r / f.mesh() < 64.0 - 1e-9 {
        return Err(LfppError::Resolution(format!(
            "rescaled mesh {} leaves fewer than 64 points across the unit square",
            f.mesh() / r
        )));
    }
    let c = f.center();
    let avg = circle_average(f, c, r)?;
    let origin = f.origin();
    let new_origin = [c[0] + (origin[0] - c[0]) / r, c[1] + (origin[1] - c[1]) / r];
    let values = f.values().iter().map(|v| v - avg).collect();
    GridField::new(f.n(), f.length() / r, new_origin, values)
}
