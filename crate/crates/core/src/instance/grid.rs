use crate::geometry::{dist, Point};

/// Uniform bucket grid over the unit square with about one point per cell.
///
/// Cells are stored in compressed form: `starts[c]..starts[c + 1]` indexes the
/// slice of `items` holding the points of cell `c`, in increasing index order.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    side: usize,
    cell: f64,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl SpatialGrid {
    pub fn build(points: &[Point]) -> Self {
        let side = ((points.len() as f64).sqrt().floor() as usize).max(1);
        let cells = side * side;
        let mut counts = vec![0u32; cells + 1];
        let keys: Vec<usize> = points
            .iter()
            .map(|&p| Self::key_for(side, p))
            .collect();
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for c in 0..cells {
            counts[c + 1] += counts[c];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut items = vec![0u32; points.len()];
        for (i, &k) in keys.iter().enumerate() {
            items[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        SpatialGrid {
            side,
            cell: 1.0 / side as f64,
            starts,
            items,
        }
    }

    fn coord(side: usize, v: f64) -> usize {
        ((v * side as f64).floor().max(0.0) as usize).min(side - 1)
    }

    fn key_for(side: usize, p: Point) -> usize {
        Self::coord(side, p.y) * side + Self::coord(side, p.x)
    }

    /// Cells per side.
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    /// `(column, row)` of the cell containing `p`; coordinates outside the
    /// square are clamped.
    pub fn cell_of(&self, p: Point) -> (usize, usize) {
        (Self::coord(self.side, p.x), Self::coord(self.side, p.y))
    }

    /// Indices of the points stored in cell `(cx, cy)`.
    pub fn cell_items(&self, cx: usize, cy: usize) -> &[u32] {
        let c = cy * self.side + cx;
        &self.items[self.starts[c] as usize..self.starts[c + 1] as usize]
    }

    /// Calls `f` for every point index in cells overlapping the box.
    pub fn for_each_in_box(&self, min: Point, max: Point, mut f: impl FnMut(usize)) {
        if max.x < 0.0 || max.y < 0.0 || min.x > 1.0 || min.y > 1.0 {
            return;
        }
        let (x0, y0) = self.cell_of(min);
        let (x1, y1) = self.cell_of(max);
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                for &i in self.cell_items(cx, cy) {
                    f(i as usize);
                }
            }
        }
    }

    /// The `k` points nearest to `query` among those not rejected by `exclude`,
    /// sorted by `(distance, index)`.
    pub fn nearest(
        &self,
        points: &[Point],
        query: Point,
        k: usize,
        exclude: impl Fn(usize) -> bool,
    ) -> Vec<(f64, usize)> {
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        if k == 0 {
            return best;
        }
        let (qx, qy) = self.cell_of(query);
        let (qx, qy) = (qx as isize, qy as isize);
        let side = self.side as isize;
        // Distance from the query to the outside of its own cell, used to
        // bound what later rings can still contribute.
        let outside = {
            let fx = query.x * side as f64 - qx as f64;
            let fy = query.y * side as f64 - qy as f64;
            fx.min(1.0 - fx).min(fy).min(1.0 - fy).max(0.0) * self.cell
        };
        let max_ring = side;
        for ring in 0..=max_ring {
            let mut visit = |cx: isize, cy: isize| {
                if cx < 0 || cy < 0 || cx >= side || cy >= side {
                    return;
                }
                for &i in self.cell_items(cx as usize, cy as usize) {
                    let i = i as usize;
                    if exclude(i) {
                        continue;
                    }
                    let d = dist(points[i], query);
                    let cand = (d, i);
                    if best.len() == k {
                        let worst = best[k - 1];
                        if cand.0 > worst.0 || (cand.0 == worst.0 && cand.1 > worst.1) {
                            continue;
                        }
                        best.pop();
                    }
                    let pos = best
                        .binary_search_by(|b| {
                            b.0.partial_cmp(&cand.0)
                                .unwrap()
                                .then(b.1.cmp(&cand.1))
                        })
                        .unwrap_or_else(|e| e);
                    best.insert(pos, cand);
                }
            };
            if ring == 0 {
                visit(qx, qy);
            } else {
                for dx in -ring..=ring {
                    visit(qx + dx, qy - ring);
                    visit(qx + dx, qy + ring);
                }
                for dy in (-ring + 1)..ring {
                    visit(qx - ring, qy + dy);
                    visit(qx + ring, qy + dy);
                }
            }
            if best.len() == k {
                // Every point in ring `ring + 1` or beyond is at least this far away.
                let reach = ring as f64 * self.cell + outside;
                if best[k - 1].0 < reach {
                    break;
                }
            }
        }
        best
    }
}
