//! Multi-source Dijkstra on a masked window of the 8-connected lattice.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::mask::RegionMask;
use super::WeightedGrid;

/// The 8 lattice steps; the first four are axis-aligned.
pub(crate) const STEPS: [(isize, isize); 8] =
    [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, 1), (1, -1), (-1, -1)];

/// Heap entry ordered so that `BinaryHeap` pops the smallest
/// `(key, state)` pair first.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Entry {
    pub key: f64,
    pub state: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.state.cmp(&self.state))
    }
}

pub(crate) const NO_PRED: u32 = u32::MAX;

/// Outcome of a single search.
pub(crate) struct SearchOutcome {
    pub value: f64,
    /// Local indices from a source to the reached target.
    pub path: Vec<u32>,
    pub expanded: usize,
}

/// Dijkstra from `sources` until the first target is settled.
///
/// Window-local indices (`y * w + x`) follow global row-major order, so ties
/// broken on local index are ties broken on global vertex index.
pub(crate) fn shortest_path(
    grid: &WeightedGrid,
    mask: &RegionMask,
    sources: &[(usize, usize)],
    targets: &[(usize, usize)],
) -> SearchOutcome {
    let (i0, j0, w, h) = mask.window();
    let size = w * h;
    let local = |(i, j): (usize, usize)| ((j - j0) * w + (i - i0)) as u32;
    let mut dist = vec![f64::INFINITY; size];
    let mut pred = vec![NO_PRED; size];
    let mut done = vec![false; size];
    let mut is_target = vec![false; size];
    for &t in targets {
        is_target[local(t) as usize] = true;
    }
    let mut heap = BinaryHeap::new();
    for &s in sources {
        let v = local(s);
        if dist[v as usize] > 0.0 {
            dist[v as usize] = 0.0;
            heap.push(Entry { key: 0.0, state: v });
        }
    }
    let mesh = grid.mesh();
    let diag = mesh * std::f64::consts::SQRT_2;
    let mut expanded = 0;
    while let Some(Entry { key, state }) = heap.pop() {
        let v = state as usize;
        if done[v] {
            continue;
        }
        done[v] = true;
        expanded += 1;
        if is_target[v] {
            let mut path = vec![state];
            let mut cur = state;
            while pred[cur as usize] != NO_PRED {
                cur = pred[cur as usize];
                path.push(cur);
            }
            path.reverse();
            return SearchOutcome { value: key, path, expanded };
        }
        let (x, y) = (v % w, v / w);
        let wv = grid.node_weight(i0 + x, j0 + y);
        for (k, &(dx, dy)) in STEPS.iter().enumerate() {
            let nx = x as isize + dx;
            let ny = y as isize + dy;
            if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                continue;
            }
            let u = ny as usize * w + nx as usize;
            if done[u] || !mask.bits[u] {
                continue;
            }
            let len = if k < 4 { mesh } else { diag };
            let wu = grid.node_weight(i0 + nx as usize, j0 + ny as usize);
            let nd = key + len * (0.5 * (wv + wu));
            if nd < dist[u] {
                dist[u] = nd;
                pred[u] = state;
                heap.push(Entry { key: nd, state: u as u32 });
            }
        }
    }
    SearchOutcome { value: f64::INFINITY, path: Vec::new(), expanded }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entry_order_pops_smallest_then_lowest_index() {
        let mut heap = BinaryHeap::new();
        heap.push(Entry { key: 2.0, state: 0 });
        heap.push(Entry { key: 1.0, state: 5 });
        heap.push(Entry { key: 1.0, state: 3 });
        let order: Vec<u32> = std::iter::from_fn(|| heap.pop()).map(|e| e.state).collect();
        assert_eq!(order, vec![3, 5, 0]);
    }
}
