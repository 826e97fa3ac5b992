use serde::{Deserialize, Serialize};

use crate::geometry::{dist, Point, ProjectedFrame};
use crate::instance::Instance;

use super::HsParams;

/// A test region: two pockets of the `delta` disk around `center`, at least
/// `delta / 2` above and below the center measured across the edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestRegion {
    pub center: Point,
    pub delta: f64,
    /// Frame of the edge the region belongs to.
    pub frame: ProjectedFrame,
    /// `+1` if the region lies on the positive-normal side of the edge, else `-1`.
    pub side: f64,
}

impl TestRegion {
    /// Distance from the edge's line, positive on the region's side.
    fn height(&self, x: Point) -> f64 {
        self.side * self.frame.signed_offset(x)
    }

    /// Pocket farther from the edge.
    pub fn upper_contains(&self, x: Point) -> bool {
        dist(x, self.center) <= self.delta
            && self.height(x) >= self.height(self.center) + 0.5 * self.delta
    }

    /// Pocket between the center and the edge.
    pub fn lower_contains(&self, x: Point) -> bool {
        dist(x, self.center) <= self.delta
            && self.height(x) <= self.height(self.center) - 0.5 * self.delta
    }

    /// Disk of radius `2 delta` around the center, clipped to the unit square.
    pub fn area_contains(&self, x: Point) -> bool {
        dist(x, self.center) <= 2.0 * self.delta && x.in_unit_square()
    }

    /// Closed-form area of one pocket: a circular segment of the unit-`delta`
    /// disk cut at half the radius.
    pub fn pocket_area(&self) -> f64 {
        self.delta * self.delta * (std::f64::consts::PI / 3.0 - 3f64.sqrt() / 4.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RegionStatus {
    NotOccupied,
    OccupiedNotStrong,
    StronglyCertifying { upper: usize, lower: usize },
}

/// Classifies a region by the vertices it holds, ignoring the edge endpoints.
pub fn region_status(region: &TestRegion, inst: &Instance, p: usize, q: usize) -> RegionStatus {
    let in_area = inst
        .points_in_disk(region.center, 2.0 * region.delta)
        .into_iter()
        .filter(|&i| i != p && i != q && region.area_contains(inst.point(i)));
    let mut total = 0usize;
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for i in in_area {
        total += 1;
        let x = inst.point(i);
        if region.upper_contains(x) {
            upper.push(i);
        } else if region.lower_contains(x) {
            lower.push(i);
        }
    }
    match (upper.as_slice(), lower.as_slice()) {
        ([], _) | (_, []) => RegionStatus::NotOccupied,
        ([u], [l]) if total == 2 => RegionStatus::StronglyCertifying { upper: *u, lower: *l },
        _ => RegionStatus::OccupiedNotStrong,
    }
}

/// Number of regions placed along the middle half of an edge of length `len`.
pub fn canonical_region_count(len: f64, params: &HsParams) -> usize {
    if len < params.gamma_bar * params.delta {
        return 0;
    }
    let half = len / 2.0;
    let fit = (half / (4.0 * params.delta) + 1e-9).floor() as usize;
    fit.min(params.f_n)
}

/// The canonical test regions of `pq`, evenly spaced along the middle half of
/// the edge on a side whose `3 delta` strip stays inside the unit square.
pub fn canonical_test_regions(p: Point, q: Point, params: &HsParams) -> Vec<TestRegion> {
    let Ok(frame) = ProjectedFrame::from_points(p, q) else {
        return Vec::new();
    };
    let len = frame.length();
    let m = canonical_region_count(len, params);
    if m == 0 {
        return Vec::new();
    }
    let Some(side) = choose_side(&frame, params.delta) else {
        return Vec::new();
    };
    let start = len / 4.0;
    let step = (len / 2.0) / m as f64;
    (0..m)
        .map(|k| TestRegion {
            center: frame.at(start + step * (k as f64 + 0.5), side * params.delta),
            delta: params.delta,
            frame,
            side,
        })
        .collect()
}

fn choose_side(frame: &ProjectedFrame, delta: f64) -> Option<f64> {
    let len = frame.length();
    let strip = |side: f64| {
        let corners = [
            frame.at(len / 4.0, 0.0),
            frame.at(0.75 * len, 0.0),
            frame.at(len / 4.0, side * 3.0 * delta),
            frame.at(0.75 * len, side * 3.0 * delta),
        ];
        let inside = corners.iter().all(|c| c.in_unit_square());
        let clearance = corners
            .iter()
            .map(|c| c.unit_square_clearance())
            .fold(f64::INFINITY, f64::min);
        (inside, clearance)
    };
    match (strip(1.0), strip(-1.0)) {
        ((true, a), (true, b)) => Some(if b > a { -1.0 } else { 1.0 }),
        ((true, _), _) => Some(1.0),
        (_, (true, _)) => Some(-1.0),
        _ => None,
    }
}
