//! Shortest closed walk separating the two boundaries of an annular mask.
//!
//! The annulus is cut along a horizontal slit running from the centre to the
//! right. Walks are lifted to a covering graph whose sheet index counts signed
//! slit crossings; a closed walk separates the boundaries exactly when its
//! lift from sheet 0 ends on sheet 1 (winding number one around the centre).
//! For every vertex `a` just above the slit we search from `(a, 0)` to
//! `(a, 1)`.
//!
//! Two prunings keep this close to the cost of a single search:
//! * a backward search from sheet 1 yields `lb(v, s)`, the distance from
//!   `(v, s)` to any state on sheet 1. It bounds the cycle through `a` from
//!   below (sources are tried in increasing `lb` order and abandoned once
//!   `lb >= best`), and it is a consistent A* potential for each per-source
//!   search;
//! * per-source searches drop states whose potential-adjusted key reaches
//!   the best cycle found so far.
//!
//! Sheets are limited to a window that widens until the optimum stays clear
//! of its edges.

use std::collections::{BinaryHeap, VecDeque};

use super::mask::RegionMask;
use super::search::{Entry, NO_PRED, STEPS};
use super::WeightedGrid;
use crate::error::{LfppError, Result};

/// Result of [`separating_cycle`] in window-free lattice coordinates.
pub(crate) struct CycleOutcome {
    pub value: f64,
    /// Closed walk, first vertex repeated at the end.
    pub path: Vec<(usize, usize)>,
    pub expanded: usize,
}

struct Cover<'a> {
    grid: &'a WeightedGrid,
    mask: &'a RegionMask,
    i0: usize,
    j0: usize,
    w: usize,
    h: usize,
    /// Global row just below the slit line.
    slit_row: usize,
    /// Fractional x coordinate of the centre.
    center_x: f64,
    sheet_min: i32,
    sheets: usize,
}

impl Cover<'_> {
    fn plane(&self) -> usize {
        self.w * self.h
    }

    fn state(&self, v: usize, sheet: i32) -> Option<usize> {
        let s = sheet - self.sheet_min;
        (s >= 0 && (s as usize) < self.sheets).then(|| s as usize * self.plane() + v)
    }

    fn split(&self, state: usize) -> (usize, i32) {
        (state % self.plane(), (state / self.plane()) as i32 + self.sheet_min)
    }

    /// Sheet change of the step `(x, y) -> (x + dx, y + dy)` (local coords).
    fn crossing(&self, x: usize, y: usize, dx: isize, dy: isize) -> i32 {
        let j = self.j0 + y;
        let cross_x = (self.i0 + x) as f64 + 0.5 * dx as f64;
        if cross_x <= self.center_x {
            0
        } else if j == self.slit_row && dy == 1 {
            1
        } else if j == self.slit_row + 1 && dy == -1 {
            -1
        } else {
            0
        }
    }

    /// Neighbours `(local index, sheet delta, edge weight)` of local `v`.
    fn neighbours(&self, v: usize, out: &mut Vec<(usize, i32, f64)>) {
        out.clear();
        let (x, y) = (v % self.w, v / self.w);
        let mesh = self.grid.mesh();
        let wv = self.grid.node_weight(self.i0 + x, self.j0 + y);
        for (k, &(dx, dy)) in STEPS.iter().enumerate() {
            let nx = x as isize + dx;
            let ny = y as isize + dy;
            if nx < 0 || ny < 0 || nx >= self.w as isize || ny >= self.h as isize {
                continue;
            }
            let u = ny as usize * self.w + nx as usize;
            if !self.mask.bits[u] {
                continue;
            }
            let len = if k < 4 { mesh } else { mesh * std::f64::consts::SQRT_2 };
            let wu = self.grid.node_weight(self.i0 + nx as usize, self.j0 + ny as usize);
            out.push((u, self.crossing(x, y, dx, dy), len * (0.5 * (wv + wu))));
        }
    }

    /// Distance from every state on sheets `<= 0` to the set of sheet-1
    /// states.
    fn lower_bounds(&self) -> (Vec<f64>, usize) {
        let mut lb = vec![f64::INFINITY; self.sheets * self.plane()];
        let mut heap = BinaryHeap::new();
        let mut nb = Vec::with_capacity(8);
        // Seeds: sheet-0 states one downward crossing away from sheet 1.
        for v in 0..self.plane() {
            if !self.mask.bits[v] {
                continue;
            }
            self.neighbours(v, &mut nb);
            for &(_, delta, wgt) in &nb {
                if delta == 1 {
                    let s = self.state(v, 0).unwrap();
                    if wgt < lb[s] {
                        lb[s] = wgt;
                        heap.push(Entry { key: wgt, state: s as u32 });
                    }
                }
            }
        }
        let mut done = vec![false; lb.len()];
        let mut expanded = 0;
        while let Some(Entry { key, state }) = heap.pop() {
            let st = state as usize;
            if done[st] {
                continue;
            }
            done[st] = true;
            expanded += 1;
            let (v, sheet) = self.split(st);
            self.neighbours(v, &mut nb);
            for &(u, delta, wgt) in &nb {
                let ns = sheet + delta;
                if ns >= 1 {
                    continue;
                }
                if let Some(us) = self.state(u, ns) {
                    let nd = key + wgt;
                    if nd < lb[us] {
                        lb[us] = nd;
                        heap.push(Entry { key: nd, state: us as u32 });
                    }
                }
            }
        }
        (lb, expanded)
    }

    fn potential(&self, lb: &[f64], state: usize) -> f64 {
        let (_, sheet) = self.split(state);
        if sheet >= 1 {
            0.0
        } else {
            lb[state]
        }
    }

    /// Best closed walk from `(a, 0)` to `(a, 1)` shorter than `bound`.
    #[allow(clippy::too_many_arguments)]
    fn cycle_from(
        &self,
        a: usize,
        lb: &[f64],
        bound: f64,
        dist: &mut [f64],
        pred: &mut [u32],
        touched: &mut Vec<usize>,
        expanded: &mut usize,
    ) -> Option<(f64, Vec<usize>)> {
        for &t in touched.iter() {
            dist[t] = f64::INFINITY;
            pred[t] = NO_PRED;
        }
        touched.clear();
        let start = self.state(a, 0).unwrap();
        let goal = self.state(a, 1).unwrap();
        let mut heap = BinaryHeap::new();
        dist[start] = 0.0;
        touched.push(start);
        heap.push(Entry { key: self.potential(lb, start), state: start as u32 });
        let mut nb = Vec::with_capacity(8);
        while let Some(Entry { key, state }) = heap.pop() {
            let st = state as usize;
            let g = dist[st];
            // Stale entry: a shorter route to `st` was found after the push.
            if key > g + self.potential(lb, st) {
                continue;
            }
            if key >= bound {
                return None;
            }
            *expanded += 1;
            if st == goal {
                let mut states = vec![st];
                let mut cur = st;
                while pred[cur] != NO_PRED {
                    cur = pred[cur] as usize;
                    states.push(cur);
                }
                states.reverse();
                return Some((g, states));
            }
            let (v, sheet) = self.split(st);
            self.neighbours(v, &mut nb);
            for &(u, delta, wgt) in &nb {
                let Some(us) = self.state(u, sheet + delta) else { continue };
                let nd = g + wgt;
                if nd < dist[us] {
                    let f = nd + self.potential(lb, us);
                    if !f.is_finite() || f >= bound {
                        continue;
                    }
                    if dist[us].is_infinite() {
                        touched.push(us);
                    }
                    dist[us] = nd;
                    pred[us] = state;
                    heap.push(Entry { key: f, state: us as u32 });
                }
            }
        }
        None
    }
}

/// Minimum-weight closed walk in `mask` winding once around `center`.
///
/// `mask` must be annular around `center`: the lattice points within one
/// mesh of `center` are excluded. Returns an infinite value when no
/// separating walk exists. Every returned walk is checked with a flood fill.
pub(crate) fn separating_cycle(
    grid: &WeightedGrid,
    mask: &RegionMask,
    center: [f64; 2],
    outer_radius: f64,
) -> Result<CycleOutcome> {
    let lat = grid.lattice();
    let (i0, j0, w, h) = mask.window();
    let c = lat.coords(center);
    if c[1] < 0.0 || c[1] >= lat.n as f64 - 1.0 {
        return Err(LfppError::Geometry("annulus centre outside the lattice".into()));
    }
    let slit_row = c[1].floor() as usize;
    let mut sheet_min = -1;
    let mut sheet_max = 2;
    loop {
        let cover = Cover {
            grid,
            mask,
            i0,
            j0,
            w,
            h,
            slit_row,
            center_x: c[0],
            sheet_min,
            sheets: (sheet_max - sheet_min + 1) as usize,
        };
        let (lb, mut expanded) = cover.lower_bounds();
        // Sources: vertices just above the slit, in increasing lower-bound
        // order (ties by index).
        let mut sources: Vec<(f64, usize)> = Vec::new();
        if slit_row + 1 >= j0 && slit_row + 1 < j0 + h {
            let y = slit_row + 1 - j0;
            for x in 0..w {
                let v = y * w + x;
                if mask.bits[v] && ((i0 + x) as f64) > c[0] - 1.0 {
                    let bound = lb[cover.state(v, 0).unwrap()];
                    if bound.is_finite() {
                        sources.push((bound, v));
                    }
                }
            }
        }
        sources.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let total = cover.sheets * cover.plane();
        let mut dist = vec![f64::INFINITY; total];
        let mut pred = vec![NO_PRED; total];
        let mut touched = Vec::new();
        let mut best = f64::INFINITY;
        let mut best_states: Vec<usize> = Vec::new();
        for &(bound, a) in &sources {
            if bound >= best {
                break;
            }
            if let Some((len, states)) =
                cover.cycle_from(a, &lb, best, &mut dist, &mut pred, &mut touched, &mut expanded)
            {
                if len < best {
                    best = len;
                    best_states = states;
                }
            }
        }
        if best.is_infinite() {
            return Ok(CycleOutcome { value: f64::INFINITY, path: Vec::new(), expanded });
        }
        let (lo, hi) = best_states.iter().fold((i32::MAX, i32::MIN), |(lo, hi), &s| {
            let sh = cover.split(s).1;
            (lo.min(sh), hi.max(sh))
        });
        if lo == sheet_min || hi == sheet_max {
            sheet_min -= 1;
            sheet_max += 1;
            continue;
        }
        let path: Vec<(usize, usize)> = best_states
            .iter()
            .map(|&s| {
                let v = cover.split(s).0;
                (i0 + v % w, j0 + v / w)
            })
            .collect();
        verify_separation(grid, &path, center, outer_radius)?;
        return Ok(CycleOutcome { value: best, path, expanded });
    }
}

/// 4-connected flood fill from the lattice point nearest `center`, avoiding
/// the walk's vertices; it must not escape the disc of radius
/// `outer_radius`.
pub(crate) fn verify_separation(
    grid: &WeightedGrid,
    walk: &[(usize, usize)],
    center: [f64; 2],
    outer_radius: f64,
) -> Result<()> {
    if !separates(grid, walk, center, outer_radius) {
        return Err(LfppError::Algorithm(
            "separating-cycle search returned a walk that does not disconnect the annulus".into(),
        ));
    }
    Ok(())
}

pub(crate) fn separates(
    grid: &WeightedGrid,
    walk: &[(usize, usize)],
    center: [f64; 2],
    outer_radius: f64,
) -> bool {
    let lat = grid.lattice();
    let n = lat.n;
    let c = lat.coords(center);
    let reach = (outer_radius / lat.mesh).ceil() as isize + 2;
    let ci = c[0].round() as isize;
    let cj = c[1].round() as isize;
    let lo_i = (ci - reach).max(0) as usize;
    let lo_j = (cj - reach).max(0) as usize;
    let hi_i = ((ci + reach) as usize).min(n - 1);
    let hi_j = ((cj + reach) as usize).min(n - 1);
    let (w, h) = (hi_i - lo_i + 1, hi_j - lo_j + 1);
    let mut blocked = vec![false; w * h];
    for &(i, j) in walk {
        if i >= lo_i && i <= hi_i && j >= lo_j && j <= hi_j {
            blocked[(j - lo_j) * w + (i - lo_i)] = true;
        }
    }
    let r_out = outer_radius + 1e-9 * lat.mesh;
    let escaped = |i: usize, j: usize| {
        let p = lat.position(i, j);
        let d = ((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)).sqrt();
        d > r_out || i == 0 || j == 0 || i == n - 1 || j == n - 1
    };
    let start = (ci as usize, cj as usize);
    let sidx = (start.1 - lo_j) * w + (start.0 - lo_i);
    if blocked[sidx] {
        return false;
    }
    let mut seen = vec![false; w * h];
    seen[sidx] = true;
    let mut queue = VecDeque::from([start]);
    while let Some((i, j)) = queue.pop_front() {
        if escaped(i, j) {
            return false;
        }
        for (di, dj) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)] {
            let ni = i as isize + di;
            let nj = j as isize + dj;
            if ni < lo_i as isize || nj < lo_j as isize || ni > hi_i as isize || nj > hi_j as isize {
                continue;
            }
            let k = (nj as usize - lo_j) * w + (ni as usize - lo_i);
            if !seen[k] && !blocked[k] {
                seen[k] = true;
                queue.push_back((ni as usize, nj as usize));
            }
        }
    }
    true
}
