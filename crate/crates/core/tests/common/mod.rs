//! Brute-force oracles shared by the oracle and acceptance tests.
#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lfpp::gff::{circle_average, Lattice};
use lfpp::metric::{distance, separating_cycle, walk_separates};
use lfpp::mollify::support_radius;
use lfpp::{AnnulusSpec, GridField, RegionMask, WeightedGrid};

const STEPS: [(i64, i64); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, 1), (1, -1), (-1, -1)];

pub struct Toy {
    pub n: usize,
    pub mesh: f64,
    pub weights: Vec<f64>,
    pub inside: Vec<bool>,
}

impl Toy {
    fn neighbours(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (x, y) = ((v % self.n) as i64, (v / self.n) as i64);
        STEPS.iter().filter_map(move |&(dx, dy)| {
            let (a, b) = (x + dx, y + dy);
            if a < 0 || b < 0 || a >= self.n as i64 || b >= self.n as i64 {
                return None;
            }
            let u = (b as usize) * self.n + a as usize;
            if !self.inside[u] {
                return None;
            }
            let len = if dx != 0 && dy != 0 { self.mesh * SQRT_2 } else { self.mesh };
            Some((u, len * (0.5 * (self.weights[v] + self.weights[u]))))
        })
    }
}

/// Minimum over all simple paths, by depth-first enumeration with
/// branch-and-bound on the partial length.
pub fn brute_force_distance(toy: &Toy, sources: &[usize], targets: &[usize]) -> f64 {
    fn dfs(toy: &Toy, v: usize, acc: f64, on: &mut [bool], targets: &[usize], best: &mut f64) {
        if acc >= *best {
            return;
        }
        if targets.contains(&v) {
            *best = acc;
            return;
        }
        for (u, w) in toy.neighbours(v).collect::<Vec<_>>() {
            if !on[u] {
                on[u] = true;
                dfs(toy, u, acc + w, on, targets, best);
                on[u] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    for &s in sources {
        let mut on = vec![false; toy.n * toy.n];
        on[s] = true;
        dfs(toy, s, 0.0, &mut on, targets, &mut best);
    }
    best
}

/// Winding number of a closed lattice polygon around `c`.
pub fn winding(points: &[[f64; 2]], c: [f64; 2]) -> i64 {
    let mut total = 0.0;
    for k in 0..points.len() {
        let a = points[k];
        let b = points[(k + 1) % points.len()];
        let (ax, ay) = (a[0] - c[0], a[1] - c[1]);
        let (bx, by) = (b[0] - c[0], b[1] - c[1]);
        total += (ax * by - ay * bx).atan2(ax * bx + ay * by);
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

/// Shortest simple cycle winding once around `c`, searched exhaustively
/// below `bound` (cycles are enumerated from their smallest vertex).
pub fn brute_force_cycle(toy: &Toy, c: [f64; 2], bound: f64) -> f64 {
    struct Search<'a> {
        toy: &'a Toy,
        s: usize,
        c: [f64; 2],
        back: Vec<f64>,
        stack: Vec<usize>,
        on: Vec<bool>,
        best: f64,
        found: f64,
    }
    impl Search<'_> {
        fn pos(&self, v: usize) -> [f64; 2] {
            [(v % self.toy.n) as f64 * self.toy.mesh, (v / self.toy.n) as f64 * self.toy.mesh]
        }
        fn dfs(&mut self, acc: f64) {
            let v = *self.stack.last().unwrap();
            for (u, w) in self.toy.neighbours(v).collect::<Vec<_>>() {
                if u == self.s && self.stack.len() >= 3 {
                    let total = acc + w;
                    let poly: Vec<[f64; 2]> = self.stack.iter().map(|&x| self.pos(x)).collect();
                    if total < self.best && winding(&poly, self.c).abs() == 1 {
                        self.best = total;
                        self.found = total;
                    }
                } else if u > self.s && !self.on[u] && acc + w + self.back[u] < self.best {
                    self.on[u] = true;
                    self.stack.push(u);
                    self.dfs(acc + w);
                    self.stack.pop();
                    self.on[u] = false;
                }
            }
        }
    }
    let nodes: Vec<usize> = (0..toy.n * toy.n).filter(|&v| toy.inside[v]).collect();
    let mut best = bound;
    let mut found = f64::INFINITY;
    for &s in &nodes {
        // Distances back to `s` through vertices above `s`, for pruning.
        let mut back = vec![f64::INFINITY; toy.n * toy.n];
        back[s] = 0.0;
        loop {
            let mut changed = false;
            for &v in nodes.iter().filter(|&&v| v >= s) {
                for (u, w) in toy.neighbours(v) {
                    if u >= s && back[u] + w < back[v] {
                        back[v] = back[u] + w;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut search = Search {
            toy,
            s,
            c,
            back,
            stack: vec![s],
            on: vec![false; toy.n * toy.n],
            best,
            found: f64::INFINITY,
        };
        search.on[s] = true;
        search.dfs(0.0);
        best = search.best;
        if search.found < found {
            found = search.found;
        }
    }
    found
}

/// `distance()` against exhaustive path enumeration on `count` random grids
/// of side at most 5. Returns the number of cases checked.
pub fn check_distance_cases(seed: u64, count: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    for case in 0..count {
        let n = rng.random_range(2..=5usize);
        let mesh = 0.25;
        let weights: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.1..3.0)).collect();
        // At least one point stays inside so every case has admissible sets.
        let keep = rng.random_range(0..n * n);
        let inside: Vec<bool> = (0..n * n).map(|v| v == keep || rng.random_bool(0.8)).collect();
        let pts: Vec<usize> = (0..n * n).filter(|&v| inside[v]).collect();
        let pick = |rng: &mut ChaCha8Rng| -> Vec<usize> {
            let k = rng.random_range(1..=3usize.min(pts.len()));
            (0..k).map(|_| pts[rng.random_range(0..pts.len())]).collect()
        };
        let sources = pick(&mut rng);
        let targets = pick(&mut rng);
        let toy = Toy { n, mesh, weights: weights.clone(), inside: inside.clone() };
        let expected = brute_force_distance(&toy, &sources, &targets);

        let lat = Lattice { n, mesh, origin: [0.0, 0.0] };
        let grid = WeightedGrid::from_node_weights(lat, weights).map_err(|e| e.to_string())?;
        let mask = RegionMask::from_predicate(&lat, [0.0, 0.0], [mesh * (n - 1) as f64; 2], |p| {
            let (i, j) = ((p[0] / mesh).round() as usize, (p[1] / mesh).round() as usize);
            inside[j * n + i]
        });
        let as_ij = |v: &usize| (v % n, v / n);
        let got = distance(
            &grid,
            &sources.iter().map(as_ij).collect::<Vec<_>>(),
            &targets.iter().map(as_ij).collect::<Vec<_>>(),
            &mask,
        )
        .map_err(|e| format!("case {case}: {e}"))?;
        if got.value != expected {
            return Err(format!("case {case} (n = {n}): search {} vs enumeration {expected}", got.value));
        }
        if got.value.is_finite() && got.path_length(&grid).map_err(|e| e.to_string())? != got.value {
            return Err(format!("case {case}: path does not sum to the reported value"));
        }
        checked += 1;
    }
    Ok(checked)
}

/// Separating-cycle search against exhaustive simple-cycle enumeration on
/// `count` random toy annuli of an 8x8 lattice.
pub fn check_around_toys(seed: u64, count: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 8;
    let lat = Lattice { n, mesh: 1.0, origin: [0.0, 0.0] };
    let center = [3.5, 3.5];
    for case in 0..count {
        let outer = rng.random_range(2.3..3.3);
        let weights: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.2..4.0)).collect();
        let a = AnnulusSpec::new(center, 1.0, outer).map_err(|e| e.to_string())?;
        let mask = RegionMask::annulus(&lat, &a);
        let grid = WeightedGrid::from_node_weights(lat, weights.clone()).map_err(|e| e.to_string())?;
        let got = separating_cycle(&grid, &mask, center, outer).map_err(|e| format!("case {case}: {e}"))?;

        let inside: Vec<bool> = (0..n * n).map(|v| mask.contains(v % n, v / n)).collect();
        let toy = Toy { n, mesh: 1.0, weights, inside };
        let expected = brute_force_cycle(&toy, center, got.value * (1.0 + 1e-9));
        let close = (got.value - expected).abs() <= 1e-12 * expected;
        if !close {
            return Err(format!("case {case}: search {} vs enumeration {expected}", got.value));
        }
        let poly: Vec<[f64; 2]> =
            got.path[..got.path.len() - 1].iter().map(|&(i, j)| lat.position(i, j)).collect();
        if winding(&poly, center).abs() != 1 || !walk_separates(&grid, &got.path, center, outer) {
            return Err(format!("case {case}: returned walk does not separate"));
        }
    }
    Ok(count)
}

/// Shortest closed walk with odd winding around the lattice point `c`,
/// found by one Dijkstra per source on a two-sheet cover cut along the
/// vertical ray above `c`. No pruning.
pub fn slit_cycle_oracle(grid: &WeightedGrid, mask: &RegionMask, c: (usize, usize)) -> f64 {
    let lat = *grid.lattice();
    let n = lat.n;
    // Crossing the ray between columns c.0 and c.0 + 1 strictly above c.
    let flips = |a: (usize, usize), b: (usize, usize)| -> bool {
        let (lo, hi) = if a.0 <= b.0 { (a, b) } else { (b, a) };
        lo.0 == c.0 && hi.0 == c.0 + 1 && (lo.1 + hi.1) > 2 * c.1
    };
    let mut best = f64::INFINITY;
    let sources: Vec<(usize, usize)> = (c.1 + 1..n).map(|j| (c.0, j)).filter(|&(i, j)| mask.contains(i, j)).collect();
    for &s in &sources {
        let idx = |p: (usize, usize), sheet: usize| (sheet * n + p.1) * n + p.0;
        let mut dist = vec![f64::INFINITY; 2 * n * n];
        let mut heap = BinaryHeap::new();
        dist[idx(s, 0)] = 0.0;
        heap.push(Reverse((OrdF64(0.0), s, 0usize)));
        while let Some(Reverse((OrdF64(d), p, sheet))) = heap.pop() {
            if d > dist[idx(p, sheet)] || d >= best {
                continue;
            }
            if p == s && sheet == 1 {
                best = d;
                break;
            }
            for &(dx, dy) in &STEPS {
                let (x, y) = (p.0 as i64 + dx, p.1 as i64 + dy);
                if x < 0 || y < 0 || x >= n as i64 || y >= n as i64 {
                    continue;
                }
                let q = (x as usize, y as usize);
                if !mask.contains(q.0, q.1) {
                    continue;
                }
                let w = grid.edge_weight(p, q).unwrap();
                let ns = if flips(p, q) { 1 - sheet } else { sheet };
                let nd = d + w;
                if nd < dist[idx(q, ns)] {
                    dist[idx(q, ns)] = nd;
                    heap.push(Reverse((OrdF64(nd), q, ns)));
                }
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// `(2C / eps^2) int_{R/2}^inf r max(log(1/r), log r, 1) exp(-r^2/eps^2) dr`
/// by composite Simpson quadrature, `R` the truncation radius.
pub fn localisation_bound(c: f64, eps: f64, q: f64) -> f64 {
    let lo = 0.5 * support_radius(eps, q);
    let hi = lo + 12.0 * eps;
    let f = |r: f64| r * (1.0 / r).ln().max(r.ln()).max(1.0) * (-(r * r) / (eps * eps)).exp();
    let m = 20_000;
    let h = (hi - lo) / m as f64;
    let mut s = f(lo) + f(hi);
    for k in 1..m {
        s += f(lo + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    2.0 * c / (eps * eps) * s * h / 3.0
}

/// Largest `|h_r(z)| / max(log(1/r), log r, 1)` over every eighth lattice
/// point of `square` and 40 radii from `2 mesh` to `6 eps`.
pub fn circle_growth_constant(f: &GridField, square: &RegionMask, eps: f64) -> f64 {
    let lat = *f.lattice();
    let radii: Vec<f64> =
        (0..40).map(|k| 2.0 * lat.mesh * (3.0 * eps / lat.mesh).powf(k as f64 / 39.0)).collect();
    let mut c: f64 = 0.0;
    for (i, j) in square.points().filter(|&(i, j)| i % 8 == 0 && j % 8 == 0) {
        let z = lat.position(i, j);
        for &r in &radii {
            let growth = (1.0 / r).ln().max(r.ln()).max(1.0);
            c = c.max(circle_average(f, z, r).unwrap().abs() / growth);
        }
    }
    c
}
