//! LFPP distances on the 8-connected weighted lattice.
//!
//! A [`WeightedGrid`] stores the node factors `exp(xi * phi)` of a mollified
//! field. The edge between neighbours `u` and `v` costs
//! `|u - v| * (exp(xi phi(u)) + exp(xi phi(v))) / 2` (trapezoid rule), with
//! `|u - v|` equal to the mesh or the mesh times `sqrt 2`.

mod around;
mod mask;
mod search;

use std::io::Write;
use std::path::Path;

use serde::Serialize;

pub use mask::{AnnulusSpec, RegionMask};

use crate::error::{LfppError, Result};
use crate::gff::Lattice;
use crate::mollify::MollifiedField;

/// Node factors `exp(xi * phi)` on a lattice.
#[derive(Debug, Clone)]
pub struct WeightedGrid {
    lattice: Lattice,
    xi: f64,
    weights: Vec<f64>,
}

impl WeightedGrid {
    pub fn new(phi: &MollifiedField, xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(LfppError::Argument(format!("LFPP parameter xi = {xi} must be positive")));
        }
        let weights: Vec<f64> = phi.base.values().iter().map(|&v| (xi * v).exp()).collect();
        if let Some(k) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(LfppError::Argument(format!(
                "node weight at index {k} is not positive and finite"
            )));
        }
        Ok(Self { lattice: *phi.base.lattice(), xi, weights })
    }

    /// Grid with explicit node factors, e.g. handcrafted test instances.
    pub fn from_node_weights(lattice: Lattice, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != lattice.n * lattice.n {
            return Err(LfppError::Argument("node weight count does not match lattice".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(LfppError::Argument("node weights must be positive and finite".into()));
        }
        Ok(Self { lattice, xi: 1.0, weights })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn mesh(&self) -> f64 {
        self.lattice.mesh
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    #[inline]
    pub fn node_weight(&self, i: usize, j: usize) -> f64 {
        self.weights[j * self.lattice.n + i]
    }

    /// Weight of the edge `a -> b`, or `None` if they are not neighbours.
    pub fn edge_weight(&self, a: (usize, usize), b: (usize, usize)) -> Option<f64> {
        let di = a.0.abs_diff(b.0);
        let dj = a.1.abs_diff(b.1);
        let len = match (di, dj) {
            (1, 0) | (0, 1) => self.mesh(),
            (1, 1) => self.mesh() * std::f64::consts::SQRT_2,
            _ => return None,
        };
        Some(len * (0.5 * (self.node_weight(a.0, a.1) + self.node_weight(b.0, b.1))))
    }
}

/// A distance value with the lattice path that realises it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceResult {
    /// `+inf` when no admissible path exists.
    pub value: f64,
    /// Lattice points from source to target; closed (first point repeated)
    /// for separating cycles.
    pub path: Vec<(usize, usize)>,
    pub expanded_nodes: usize,
}

impl DistanceResult {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    /// Sum of edge weights along the path, accumulated from the first point.
    pub fn path_length(&self, grid: &WeightedGrid) -> Result<f64> {
        let mut total = 0.0;
        for pair in self.path.windows(2) {
            total += grid.edge_weight(pair[0], pair[1]).ok_or_else(|| {
                LfppError::Algorithm(format!("path step {:?} -> {:?} is not an edge", pair[0], pair[1]))
            })?;
        }
        Ok(total)
    }

    /// Writes the path as `x,y` plane coordinates, one point per line.
    pub fn write_path_csv(&self, lattice: &Lattice, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "x,y")?;
        for &(i, j) in &self.path {
            let p = lattice.position(i, j);
            writeln!(out, "{},{}", p[0], p[1])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Minimum-weight path from any source to any target through `mask`.
pub fn distance(
    grid: &WeightedGrid,
    sources: &[(usize, usize)],
    targets: &[(usize, usize)],
    mask: &RegionMask,
) -> Result<DistanceResult> {
    if sources.is_empty() || targets.is_empty() {
        return Err(LfppError::Argument("source and target sets must be nonempty".into()));
    }
    if let Some(p) = sources.iter().chain(targets).find(|&&(i, j)| !mask.contains(i, j)) {
        return Err(LfppError::Argument(format!("point {p:?} lies outside the mask")));
    }
    let (i0, j0, w, _) = mask.window();
    let out = search::shortest_path(grid, mask, sources, targets);
    let path = out
        .path
        .iter()
        .map(|&v| (i0 + v as usize % w, j0 + v as usize / w))
        .collect();
    Ok(DistanceResult { value: out.value, path, expanded_nodes: out.expanded })
}

/// Axis-aligned square given by centre and side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Square {
    pub center: [f64; 2],
    pub side: f64,
}

impl Square {
    pub fn unit_at(center: [f64; 2]) -> Self {
        Self { center, side: 1.0 }
    }
}

/// Left-right crossing distance of `square`, internal to the square.
pub fn crossing_distance(grid: &WeightedGrid, square: Square) -> Result<DistanceResult> {
    let lat = grid.lattice();
    if square.side < 16.0 * lat.mesh * (1.0 - 1e-12) {
        return Err(LfppError::Resolution(format!(
            "square side {} is below 16 lattice spacings",
            square.side
        )));
    }
    if !lat.contains_disc(square.center, 0.5 * square.side) {
        return Err(LfppError::Geometry("square leaves the lattice".into()));
    }
    let mask = RegionMask::square(lat, square.center, square.side);
    let (left, right) = mask
        .column_extent()
        .ok_or_else(|| LfppError::Geometry("square contains no lattice points".into()))?;
    let sources: Vec<_> = mask.points().filter(|p| p.0 == left).collect();
    let targets: Vec<_> = mask.points().filter(|p| p.0 == right).collect();
    distance(grid, &sources, &targets, &mask)
}

fn check_annulus(grid: &WeightedGrid, a: &AnnulusSpec) -> Result<RegionMask> {
    let lat = grid.lattice();
    if a.outer - a.inner < 8.0 * lat.mesh * (1.0 - 1e-12) {
        return Err(LfppError::Resolution(format!(
            "annulus width {} is below 8 lattice spacings",
            a.outer - a.inner
        )));
    }
    if a.inner < lat.mesh {
        return Err(LfppError::Resolution("inner radius below one lattice spacing".into()));
    }
    if !lat.contains_disc(a.center, a.outer) {
        return Err(LfppError::Geometry("annulus leaves the lattice".into()));
    }
    let mask = RegionMask::annulus(lat, a);
    if mask.is_empty() {
        return Err(LfppError::Geometry("annulus rasterisation is empty".into()));
    }
    Ok(mask)
}

/// Distance between the inner and outer boundary bands of the annulus,
/// internal to the closed annulus.
pub fn across_annulus(grid: &WeightedGrid, a: &AnnulusSpec) -> Result<DistanceResult> {
    let mask = check_annulus(grid, a)?;
    let lat = grid.lattice();
    let inner = mask.circle_band(lat, a.center, a.inner);
    let outer = mask.circle_band(lat, a.center, a.outer);
    distance(grid, &inner, &outer, &mask)
}

/// Shortest closed walk in the closed annulus separating its boundaries.
pub fn around_annulus(grid: &WeightedGrid, a: &AnnulusSpec) -> Result<DistanceResult> {
    let mask = check_annulus(grid, a)?;
    separating_cycle(grid, &mask, a.center, a.outer)
}

/// [`around_annulus`] on an arbitrary annular mask, without the minimum
/// width requirement. The lattice points within one mesh of `center` must
/// be outside `mask`, and `mask` must lie in the disc of radius
/// `outer_radius`.
pub fn separating_cycle(
    grid: &WeightedGrid,
    mask: &RegionMask,
    center: [f64; 2],
    outer_radius: f64,
) -> Result<DistanceResult> {
    let out = around::separating_cycle(grid, mask, center, outer_radius)?;
    Ok(DistanceResult { value: out.value, path: out.path, expanded_nodes: out.expanded })
}

/// Flood-fill check that a closed walk disconnects `center` from the
/// complement of the disc of radius `outer_radius`.
pub fn walk_separates(
    grid: &WeightedGrid,
    walk: &[(usize, usize)],
    center: [f64; 2],
    outer_radius: f64,
) -> bool {
    around::separates(grid, walk, center, outer_radius)
}

/// Distance between the closed balls `B_rho(z)` and `B_rho(w)` internal to
/// `B_rho(U)`. A zero radius uses the nearest lattice points.
pub fn ball_to_ball(
    grid: &WeightedGrid,
    z: [f64; 2],
    w: [f64; 2],
    rho: f64,
    region: &RegionMask,
) -> Result<DistanceResult> {
    let lat = grid.lattice();
    let hull = region.dilate(lat, rho);
    let ball = |c: [f64; 2]| -> Result<Vec<(usize, usize)>> {
        let pts: Vec<_> = if rho > 0.0 {
            RegionMask::disc(lat, c, rho).points().collect()
        } else {
            Vec::new()
        };
        if pts.is_empty() {
            let p = lat
                .nearest(c)
                .ok_or_else(|| LfppError::Geometry(format!("point {c:?} is off the lattice")))?;
            return Ok(vec![p]);
        }
        Ok(pts)
    };
    let sources = ball(z)?;
    let targets = ball(w)?;
    if !lat.contains_disc(z, rho) || !lat.contains_disc(w, rho) {
        return Err(LfppError::Geometry("ball leaves the lattice".into()));
    }
    if sources.iter().chain(&targets).any(|&(i, j)| !hull.contains(i, j)) {
        return Err(LfppError::Geometry("balls are not contained in B_rho(U)".into()));
    }
    distance(grid, &sources, &targets, &hull)
}
