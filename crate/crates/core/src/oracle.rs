//! Exact tours for small instances by bitmask dynamic programming.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::dist;
use crate::instance::Instance;

pub const DEFAULT_MAX_N: usize = 15;
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourResult {
    /// Starts at vertex 0; the second entry is smaller than the last.
    pub order: Vec<usize>,
    pub length: f64,
}

impl TourResult {
    fn canonical(inst: &Instance, mut order: Vec<usize>) -> Self {
        let start = order.iter().position(|&v| v == 0).unwrap_or(0);
        order.rotate_left(start);
        if order.len() > 2 && order[1] > order[order.len() - 1] {
            order[1..].reverse();
        }
        let length = tour_length(inst, &order);
        TourResult { order, length }
    }

    /// Whether the tour uses the undirected edge `{i, j}`.
    pub fn contains_edge(&self, i: usize, j: usize) -> bool {
        let n = self.order.len();
        (0..n).any(|k| {
            let (a, b) = (self.order[k], self.order[(k + 1) % n]);
            (a == i && b == j) || (a == j && b == i)
        })
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.order.len();
        (0..n)
            .map(|k| {
                let (a, b) = (self.order[k], self.order[(k + 1) % n]);
                (a.min(b), a.max(b))
            })
            .collect()
    }
}

/// Length of the closed tour visiting `order`, summed in order.
pub fn tour_length(inst: &Instance, order: &[usize]) -> f64 {
    let n = order.len();
    (0..n)
        .map(|k| dist(inst.point(order[k]), inst.point(order[(k + 1) % n])))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactOracle {
    pub max_n: usize,
}

impl Default for ExactOracle {
    fn default() -> Self {
        ExactOracle { max_n: DEFAULT_MAX_N }
    }
}

impl ExactOracle {
    fn check(&self, inst: &Instance) -> Result<()> {
        let n = inst.n();
        if n < 3 || n > self.max_n {
            return Err(Error::SizeOutOfRange { n, min: 3, max: self.max_n });
        }
        Ok(())
    }

    pub fn optimal_tour(&self, inst: &Instance) -> Result<TourResult> {
        self.check(inst)?;
        let order = shortest_path_cover(inst, 0, None);
        Ok(TourResult::canonical(inst, order))
    }

    /// Best tour among those using the edge `{i, j}`: the shortest Hamiltonian
    /// path from `i` to `j`, closed by the edge.
    pub fn optimal_tour_with_edge(&self, inst: &Instance, i: usize, j: usize) -> Result<TourResult> {
        self.check(inst)?;
        inst.check_index(i)?;
        inst.check_index(j)?;
        if i == j {
            return Err(Error::DegenerateSegment);
        }
        let order = shortest_path_cover(inst, i, Some(j));
        Ok(TourResult::canonical(inst, order))
    }

    pub fn is_edge_useless(&self, inst: &Instance, i: usize, j: usize, tol: f64) -> Result<bool> {
        let best = self.optimal_tour(inst)?;
        let forced = self.optimal_tour_with_edge(inst, i, j)?;
        Ok(forced.length > best.length + tol)
    }
}

pub fn optimal_tour(inst: &Instance) -> Result<TourResult> {
    ExactOracle::default().optimal_tour(inst)
}

pub fn optimal_tour_with_edge(inst: &Instance, i: usize, j: usize) -> Result<TourResult> {
    ExactOracle::default().optimal_tour_with_edge(inst, i, j)
}

pub fn is_edge_useless_bruteforce(inst: &Instance, i: usize, j: usize, tol: f64) -> Result<bool> {
    ExactOracle::default().is_edge_useless(inst, i, j, tol)
}

/// Held-Karp over paths starting at `start`. With `end = None` the path is
/// closed back to `start` (a tour); otherwise it must finish at `end` and the
/// closing edge `end -> start` is added.
fn shortest_path_cover(inst: &Instance, start: usize, end: Option<usize>) -> Vec<usize> {
    let n = inst.n();
    // Relabel so `start` is dropped from the bitmask.
    let others: Vec<usize> = (0..n).filter(|&v| v != start).collect();
    let m = others.len();
    let d = |a: usize, b: usize| dist(inst.point(a), inst.point(b));
    let full = (1usize << m) - 1;
    let mut cost = vec![f64::INFINITY; (full + 1) * m];
    let mut parent = vec![u8::MAX; (full + 1) * m];
    for (k, &v) in others.iter().enumerate() {
        cost[(1 << k) * m + k] = d(start, v);
    }
    for mask in 1..=full {
        for last in 0..m {
            if mask & (1 << last) == 0 {
                continue;
            }
            let here = cost[mask * m + last];
            if !here.is_finite() {
                continue;
            }
            // An early finish at the forced end vertex cannot be extended.
            if end == Some(others[last]) && mask != full {
                continue;
            }
            for next in 0..m {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let nm = mask | (1 << next);
                let c = here + d(others[last], others[next]);
                if c < cost[nm * m + next] {
                    cost[nm * m + next] = c;
                    parent[nm * m + next] = last as u8;
                }
            }
        }
    }
    let last = match end {
        Some(e) => others.iter().position(|&v| v == e).expect("end differs from start"),
        None => (0..m)
            .min_by(|&a, &b| {
                let ca = cost[full * m + a] + d(others[a], start);
                let cb = cost[full * m + b] + d(others[b], start);
                ca.total_cmp(&cb)
            })
            .expect("at least two other vertices"),
    };
    let mut order = Vec::with_capacity(n);
    let (mut mask, mut cur) = (full, last);
    loop {
        order.push(others[cur]);
        let prev = parent[mask * m + cur];
        mask &= !(1 << cur);
        if prev == u8::MAX {
            break;
        }
        cur = prev as usize;
    }
    order.push(start);
    order.reverse();
    order
}
