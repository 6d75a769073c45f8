use serde::{Deserialize, Serialize};

use crate::error::{LfppError, Result};
use crate::gff::Lattice;

/// Open annulus `B_{r2}(z) \ closure(B_{r1}(z))`; rasterised closed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub center: [f64; 2],
    pub inner: f64,
    pub outer: f64,
}

impl AnnulusSpec {
    pub fn new(center: [f64; 2], inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(LfppError::Argument(format!(
                "annulus radii must satisfy 0 < r1 < r2, got ({inner}, {outer})"
            )));
        }
        Ok(Self { center, inner, outer })
    }

    pub fn distance_from_center(&self, p: [f64; 2]) -> f64 {
        ((p[0] - self.center[0]).powi(2) + (p[1] - self.center[1]).powi(2)).sqrt()
    }
}

/// Slack for membership tests on exactly representable boundaries.
const TOL: f64 = 1e-9;

/// A rasterised subdomain: a rectangular window of lattice points with a
/// membership bitmap.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMask {
    pub(crate) i0: usize,
    pub(crate) j0: usize,
    pub(crate) w: usize,
    pub(crate) h: usize,
    pub(crate) bits: Vec<bool>,
}

impl RegionMask {
    /// Lattice points of `lat` inside the plane box `[lo, hi]` satisfying
    /// `pred`.
    pub fn from_predicate(
        lat: &Lattice,
        lo: [f64; 2],
        hi: [f64; 2],
        pred: impl Fn([f64; 2]) -> bool,
    ) -> RegionMask {
        let a = lat.coords(lo);
        let b = lat.coords(hi);
        let max = lat.n as f64 - 1.0;
        let i0 = (a[0] - TOL).ceil().clamp(0.0, max) as usize;
        let j0 = (a[1] - TOL).ceil().clamp(0.0, max) as usize;
        let i1 = (b[0] + TOL).floor().clamp(0.0, max) as usize;
        let j1 = (b[1] + TOL).floor().clamp(0.0, max) as usize;
        if i1 < i0 || j1 < j0 {
            return RegionMask { i0: 0, j0: 0, w: 0, h: 0, bits: Vec::new() };
        }
        let (w, h) = (i1 - i0 + 1, j1 - j0 + 1);
        let mut bits = vec![false; w * h];
        for y in 0..h {
            for x in 0..w {
                bits[y * w + x] = pred(lat.position(i0 + x, j0 + y));
            }
        }
        RegionMask { i0, j0, w, h, bits }.trimmed()
    }

    /// Every lattice point.
    pub fn full(lat: &Lattice) -> RegionMask {
        RegionMask { i0: 0, j0: 0, w: lat.n, h: lat.n, bits: vec![true; lat.n * lat.n] }
    }

    /// Closed axis-aligned rectangle.
    pub fn rect(lat: &Lattice, lo: [f64; 2], hi: [f64; 2]) -> RegionMask {
        Self::from_predicate(lat, lo, hi, |_| true)
    }

    /// Closed axis-aligned square of side `side` centred at `center`.
    pub fn square(lat: &Lattice, center: [f64; 2], side: f64) -> RegionMask {
        let h = 0.5 * side;
        Self::rect(lat, [center[0] - h, center[1] - h], [center[0] + h, center[1] + h])
    }

    /// Closed disc.
    pub fn disc(lat: &Lattice, center: [f64; 2], radius: f64) -> RegionMask {
        let r2 = radius * radius;
        let slack = TOL * lat.mesh * lat.mesh;
        Self::from_predicate(
            lat,
            [center[0] - radius, center[1] - radius],
            [center[0] + radius, center[1] + radius],
            |p| (p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2) <= r2 + slack,
        )
    }

    /// Closed annulus `r1 <= |p - z| <= r2`.
    pub fn annulus(lat: &Lattice, a: &AnnulusSpec) -> RegionMask {
        let slack = TOL * lat.mesh;
        let c = a.center;
        Self::from_predicate(
            lat,
            [c[0] - a.outer, c[1] - a.outer],
            [c[0] + a.outer, c[1] + a.outer],
            |p| {
                let d = a.distance_from_center(p);
                d >= a.inner - slack && d <= a.outer + slack
            },
        )
    }

    /// Points whose distance to `center` is within one mesh of `radius`,
    /// restricted to this mask.
    pub fn circle_band(&self, lat: &Lattice, center: [f64; 2], radius: f64) -> Vec<(usize, usize)> {
        self.points()
            .filter(|&(i, j)| {
                let p = lat.position(i, j);
                let d = ((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)).sqrt();
                (d - radius).abs() <= lat.mesh * (1.0 + TOL)
            })
            .collect()
    }

    /// `B_rho(U)`: lattice points within Euclidean distance `rho` of a point
    /// of this mask.
    pub fn dilate(&self, lat: &Lattice, rho: f64) -> RegionMask {
        if rho <= 0.0 || self.is_empty() {
            return self.clone();
        }
        let reach = (rho / lat.mesh + TOL).floor() as isize;
        let r2 = (rho / lat.mesh) * (rho / lat.mesh) * (1.0 + TOL);
        let n = lat.n as isize;
        let i0 = (self.i0 as isize - reach).max(0);
        let j0 = (self.j0 as isize - reach).max(0);
        let i1 = (self.i0 as isize + self.w as isize - 1 + reach).min(n - 1);
        let j1 = (self.j0 as isize + self.h as isize - 1 + reach).min(n - 1);
        let (w, h) = ((i1 - i0 + 1) as usize, (j1 - j0 + 1) as usize);
        let mut bits = vec![false; w * h];
        let offsets: Vec<(isize, isize)> = (-reach..=reach)
            .flat_map(|dj| (-reach..=reach).map(move |di| (di, dj)))
            .filter(|&(di, dj)| ((di * di + dj * dj) as f64) <= r2)
            .collect();
        for (i, j) in self.points() {
            let interior = self.contains(i.wrapping_sub(1), j)
                && self.contains(i + 1, j)
                && self.contains(i, j.wrapping_sub(1))
                && self.contains(i, j + 1);
            let stamp: &[(isize, isize)] = if interior { &[(0, 0)] } else { &offsets };
            for &(di, dj) in stamp {
                let (x, y) = (i as isize + di, j as isize + dj);
                if x >= i0 && x <= i1 && y >= j0 && y <= j1 {
                    bits[(y - j0) as usize * w + (x - i0) as usize] = true;
                }
            }
        }
        RegionMask { i0: i0 as usize, j0: j0 as usize, w, h, bits }.trimmed()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        if i < self.i0 || j < self.j0 || i >= self.i0 + self.w || j >= self.j0 + self.h {
            return false;
        }
        self.bits[(j - self.j0) * self.w + (i - self.i0)]
    }

    pub fn points(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.h).flat_map(move |y| {
            (0..self.w).filter_map(move |x| {
                self.bits[y * self.w + x].then_some((self.i0 + x, self.j0 + y))
            })
        })
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn is_subset_of(&self, other: &RegionMask) -> bool {
        self.points().all(|(i, j)| other.contains(i, j))
    }

    /// Bounding window `(i0, j0, w, h)` in lattice indices.
    pub fn window(&self) -> (usize, usize, usize, usize) {
        (self.i0, self.j0, self.w, self.h)
    }

    /// Leftmost and rightmost occupied columns.
    pub fn column_extent(&self) -> Option<(usize, usize)> {
        let mut lo = None;
        let mut hi = None;
        for (i, _) in self.points() {
            lo = Some(lo.map_or(i, |l: usize| l.min(i)));
            hi = Some(hi.map_or(i, |h: usize| h.max(i)));
        }
        lo.zip(hi)
    }

    fn trimmed(self) -> RegionMask {
        let pts: Vec<(usize, usize)> = self.points().collect();
        if pts.is_empty() {
            return RegionMask { i0: 0, j0: 0, w: 0, h: 0, bits: Vec::new() };
        }
        let i0 = pts.iter().map(|p| p.0).min().unwrap();
        let i1 = pts.iter().map(|p| p.0).max().unwrap();
        let j0 = pts.iter().map(|p| p.1).min().unwrap();
        let j1 = pts.iter().map(|p| p.1).max().unwrap();
        if (i0, j0, i1 - i0 + 1, j1 - j0 + 1) == (self.i0, self.j0, self.w, self.h) {
            return self;
        }
        let (w, h) = (i1 - i0 + 1, j1 - j0 + 1);
        let mut bits = vec![false; w * h];
        for (i, j) in pts {
            bits[(j - j0) * w + (i - i0)] = true;
        }
        RegionMask { i0, j0, w, h, bits }
    }
}
