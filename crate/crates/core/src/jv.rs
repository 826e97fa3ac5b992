//! Single-witness edge elimination: an edge `pq` is useless if some vertex `r`
//! makes every other vertex a worse detour than `q` on both sides.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, Point, ProjectedFrame, EPS};
use crate::instance::Instance;
use crate::montecarlo::{estimate_area, AreaEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessStrategy {
    /// Every vertex is tried; a negative answer is definitive.
    AllVertices,
    /// Only the `k` vertices with the smallest detour `d(p, r) + d(r, q)`.
    NearestK(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JvParams {
    pub witness_strategy: WitnessStrategy,
    pub eps_margin: f64,
    /// Border width used by the area diagnostics.
    pub alpha: f64,
}

impl JvParams {
    pub fn for_n(n: usize) -> Self {
        JvParams {
            witness_strategy: if n <= 2000 {
                WitnessStrategy::AllVertices
            } else {
                WitnessStrategy::NearestK(10)
            },
            eps_margin: 1e-12,
            alpha: 0.25,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1/2), got {}", self.alpha)));
        }
        if self.witness_strategy == WitnessStrategy::NearestK(0) {
            return Err(Error::InvalidConfig("nearest-k needs k >= 1".into()));
        }
        if !(self.eps_margin >= 0.0) {
            return Err(Error::InvalidConfig("eps_margin must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JvWitness {
    pub r: usize,
}

fn check_triple(inst: &Instance, p: usize, q: usize, r: usize) -> Result<()> {
    if inst.n() < 4 {
        return Err(Error::NotApplicable(format!(
            "the criterion needs at least 4 vertices, got {}",
            inst.n()
        )));
    }
    inst.check_index(p)?;
    inst.check_index(q)?;
    inst.check_index(r)?;
    if p == q {
        return Err(Error::DegenerateSegment);
    }
    if r == p || r == q {
        return Err(Error::InvalidInstance("the witness must differ from both endpoints".into()));
    }
    Ok(())
}

/// Gains of routing through `q` instead of `r` from either endpoint.
#[derive(Clone, Copy)]
struct Gains {
    via_q: f64,
    via_p: f64,
}

impl Gains {
    fn new(p: Point, q: Point, r: Point) -> Self {
        let pq = dist(p, q);
        Gains {
            via_q: pq - dist(q, r),
            via_p: pq - dist(p, r),
        }
    }

    fn beats(&self, p: Point, q: Point, r: Point, z: Point, eps: f64) -> bool {
        let zr = dist(z, r);
        self.via_q > dist(p, z) - zr + eps && self.via_p > dist(z, q) - zr + eps
    }
}

fn witness_holds(inst: &Instance, p: usize, q: usize, r: usize, eps: f64) -> bool {
    let pts = inst.points();
    let (pp, qp, rp) = (pts[p], pts[q], pts[r]);
    let gains = Gains::new(pp, qp, rp);
    pts.iter()
        .enumerate()
        .all(|(z, &zp)| z == p || z == q || z == r || gains.beats(pp, qp, rp, zp, eps))
}

/// Whether `r` certifies that `pq` is useless.
pub fn jv_witness_eliminates(
    inst: &Instance,
    p: usize,
    q: usize,
    r: usize,
    params: &JvParams,
) -> Result<bool> {
    check_triple(inst, p, q, r)?;
    Ok(witness_holds(inst, p, q, r, params.eps_margin))
}

/// Searches for a witness per the strategy, in order of distance from the
/// midpoint of `pq`.
pub fn jv_edge_useless(
    inst: &Instance,
    p: usize,
    q: usize,
    params: &JvParams,
) -> Result<Option<JvWitness>> {
    if inst.n() < 4 {
        return Err(Error::NotApplicable(format!(
            "the criterion needs at least 4 vertices, got {}",
            inst.n()
        )));
    }
    inst.check_index(p)?;
    inst.check_index(q)?;
    if p == q {
        return Err(Error::DegenerateSegment);
    }
    let pts = inst.points();
    let (pp, qp) = (pts[p], pts[q]);
    let mid = pp.midpoint(qp);
    let eps = params.eps_margin;
    let nbrs = inst.cached_neighbors();
    // Necessary condition: the witness must already beat its cached nearest
    // neighbours (other than p and q).
    let plausible = |r: usize| {
        let rp = pts[r];
        let gains = Gains::new(pp, qp, rp);
        nbrs[r]
            .iter()
            .map(|&z| z as usize)
            .filter(|&z| z < pts.len() && z != p && z != q)
            .all(|z| gains.beats(pp, qp, rp, pts[z], eps))
    };
    let candidates: Vec<usize> = match params.witness_strategy {
        WitnessStrategy::NearestK(k) => smallest_detours(inst, p, q, k)
            .into_iter()
            .filter(|&r| plausible(r))
            .collect(),
        WitnessStrategy::AllVertices => {
            let mut survivors: Vec<(f64, usize)> = (0..inst.n())
                .filter(|&r| r != p && r != q && plausible(r))
                .map(|r| (dist(pts[r], mid), r))
                .collect();
            survivors.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            survivors.into_iter().map(|(_, r)| r).collect()
        }
    };
    Ok(candidates
        .into_iter()
        .find(|&r| witness_holds(inst, p, q, r, eps))
        .map(|r| JvWitness { r }))
}

/// The `k` vertices other than `p`, `q` with the smallest detour
/// `d(p, r) + d(r, q)`, in increasing order of detour then index.
///
/// Points are gathered from a corridor of half-width `h` around the segment,
/// which contains the ellipse of detours up to `sqrt(L^2 + 4h^2)`; `h` doubles
/// until that ellipse holds `k` points.
pub fn smallest_detours(inst: &Instance, p: usize, q: usize, k: usize) -> Vec<usize> {
    let (pp, qp) = (inst.point(p), inst.point(q));
    let len = dist(pp, qp);
    let want = k.min(inst.n().saturating_sub(2));
    if want == 0 {
        return Vec::new();
    }
    let cell = inst.grid().cell_size();
    let mut h = cell;
    loop {
        let steps = (len / cell).ceil().max(1.0) as usize;
        let mut found: Vec<usize> = Vec::new();
        for s in 0..=steps {
            let probe = pp + (qp - pp) * (s as f64 / steps as f64);
            found.extend(inst.points_in_disk(probe, h + cell));
        }
        found.sort_unstable();
        found.dedup();
        let mut scored: Vec<(f64, usize)> = found
            .into_iter()
            .filter(|&z| z != p && z != q)
            .map(|z| (dist(pp, inst.point(z)) + dist(inst.point(z), qp), z))
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let covered = (len * len + 4.0 * h * h).sqrt();
        let inside = scored.iter().take_while(|(d, _)| *d <= covered).count();
        if inside >= want || h > 2.0 {
            return scored.into_iter().take(want).map(|(_, z)| z).collect();
        }
        h *= 2.0;
    }
}

/// `dist(p, z) - dist(z, r) >= dist(p, q) - dist(q, r)`: the set of `z` that
/// would be at least as good a detour as `q`.
pub fn hyperbola_contains(p: Point, q: Point, r: Point, z: Point) -> bool {
    dist(p, z) - dist(z, r) >= dist(p, q) - dist(q, r)
}

/// Semi-axes of the detour hyperbola with foci `p` and `r`, and its frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolaParams {
    /// Half the gain of `q` over `r`; negative when `q` is farther from `r` than from `p`.
    pub a: f64,
    pub b: f64,
    /// Midpoint of `pr`.
    pub origin: Point,
    /// Unit vector from `p` towards `r`.
    pub axis: Point,
}

impl HyperbolaParams {
    /// Coordinates of `z` in the frame with `pr` on the x axis, `r` at positive x.
    pub fn to_frame(&self, z: Point) -> (f64, f64) {
        let d = z - self.origin;
        (d.dot(self.axis), self.axis.cross(d))
    }

    /// Standard-form membership; only meaningful when `a > 0` and `b > 0`.
    pub fn branch_contains(&self, z: Point) -> bool {
        let (x, y) = self.to_frame(z);
        x >= 0.0 && x * x / (self.a * self.a) - y * y / (self.b * self.b) >= 1.0
    }
}

pub fn hyperbola_params(p: Point, q: Point, r: Point) -> Result<HyperbolaParams> {
    let pr = dist(p, r);
    if pr < EPS {
        return Err(Error::DegenerateSegment);
    }
    let a = (dist(p, q) - dist(q, r)) / 2.0;
    let c = pr / 2.0;
    if a > c + 1e-12 {
        return Err(Error::NotApplicable(format!(
            "half-gain {a} exceeds half focal distance {c}"
        )));
    }
    Ok(HyperbolaParams {
        a,
        b: (c * c - a * a).max(0.0).sqrt(),
        origin: p.midpoint(r),
        axis: (r - p) * (1.0 / pr),
    })
}

/// Whether `z` is closer than `alpha` to the boundary of the unit square.
pub fn in_alpha_border(z: Point, alpha: f64) -> bool {
    z.unit_square_clearance() < alpha
}

/// Index of the distance band `[k/n, (k+1)/n)` from line `pq` containing `r`,
/// if `r` projects onto the doubled segment from `p` to the reflection of `p` in `q`.
pub fn prob_area_index(r: Point, p: Point, q: Point, n: usize) -> Option<usize> {
    let frame = ProjectedFrame::from_points(p, q).ok()?;
    let t = frame.along(r) / frame.length();
    if !(0.0..=2.0).contains(&t) {
        return None;
    }
    Some((n as f64 * frame.dist_to_line(r)).floor() as usize)
}

/// Monte Carlo area of the detour hyperbola within the unit square.
pub fn estimate_hyperbola_area(
    p: Point,
    q: Point,
    r: Point,
    sample_count: u64,
    seed: u64,
) -> Result<AreaEstimate> {
    if sample_count < 10_000 {
        return Err(Error::InvalidConfig(format!(
            "at least 10000 samples required, got {sample_count}"
        )));
    }
    estimate_area(Point::new(0.0, 0.0), Point::new(1.0, 1.0), sample_count, seed, |z| {
        hyperbola_contains(p, q, r, z)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn four() -> Instance {
        Instance::from_coords(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.1), (0.5, 0.9)]).unwrap()
    }

    #[test]
    fn four_point_example() {
        let inst = four();
        let params = JvParams::for_n(4);
        // Both gains equal 1 - sqrt(0.26); both detour terms equal sqrt(0.81 + 0.25) - 0.8.
        let gain = 1.0 - 0.26f64.sqrt();
        let detour = 1.06f64.sqrt() - 0.8;
        assert!((gain - 0.4901).abs() < 1e-4 && (detour - 0.2296).abs() < 1e-4);
        assert!(jv_witness_eliminates(&inst, 0, 1, 2, &params).unwrap());
        assert_eq!(jv_edge_useless(&inst, 0, 1, &params).unwrap(), Some(JvWitness { r: 2 }));
    }

    #[test]
    fn witness_preconditions() {
        let inst = four();
        let params = JvParams::for_n(4);
        assert!(jv_witness_eliminates(&inst, 0, 1, 1, &params).is_err());
        let three = Instance::from_coords(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.1)]).unwrap();
        assert!(matches!(
            jv_edge_useless(&three, 0, 1, &params),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn midpoint_blocker_defeats_witness() {
        // q at least as far from r as p is, and z halfway between p and r.
        let inst = Instance::from_coords(&[(0.2, 0.2), (0.2, 0.5), (0.6, 0.2), (0.4, 0.2)]).unwrap();
        let params = JvParams::for_n(4);
        assert!(!jv_witness_eliminates(&inst, 0, 1, 2, &params).unwrap());
    }

    #[test]
    fn no_witness_in_degenerate_line() {
        let inst =
            Instance::from_coords(&[(0.1, 0.5), (0.3, 0.5), (0.5, 0.5), (0.7, 0.5)]).unwrap();
        let params = JvParams::for_n(4);
        assert_eq!(jv_edge_useless(&inst, 0, 1, &params).unwrap(), None);
    }

    #[test]
    fn square_diagonals_only() {
        let inst = Instance::from_coords(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap();
        let params = JvParams::for_n(4);
        assert!(jv_edge_useless(&inst, 0, 2, &params).unwrap().is_some());
        assert!(jv_edge_useless(&inst, 1, 3, &params).unwrap().is_some());
        for (i, j) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            assert!(jv_edge_useless(&inst, i, j, &params).unwrap().is_none());
        }
    }

    #[test]
    fn hyperbola_examples() {
        let (p, q) = (pt(0.0, 0.0), pt(1.0, 0.0));
        let r = pt(0.5, 0.1);
        assert!(hyperbola_contains(p, q, r, q));
        assert!(!hyperbola_contains(p, q, r, p));

        let h = hyperbola_params(p, q, r).unwrap();
        assert!((h.a - 0.24505).abs() < 1e-5);
        assert!((h.b - 0.07036).abs() < 1e-5);
        assert!((h.b * h.b - (0.26f64.sqrt() / 2.0).powi(2) + h.a * h.a).abs() < 1e-12);

        let at_q = hyperbola_params(p, q, q).unwrap();
        assert!((at_q.a - 0.5).abs() < 1e-15 && at_q.b == 0.0);
        let equal = hyperbola_params(p, q, pt(1.0, 1.0)).unwrap();
        assert!(equal.a.abs() < 1e-15);
        assert!(hyperbola_params(p, q, p).is_err());
    }

    #[test]
    fn border_and_bands() {
        assert!(!in_alpha_border(pt(0.5, 0.5), 0.25));
        assert!(in_alpha_border(pt(0.1, 0.5), 0.25));
        assert!(!in_alpha_border(pt(0.25, 0.5), 0.25));

        let (p, q) = (pt(0.2, 0.5), pt(0.5, 0.5));
        assert_eq!(prob_area_index(pt(0.3, 0.5), p, q, 100), Some(0));
        assert_eq!(prob_area_index(pt(0.6, 0.53), p, q, 100), Some(3));
        assert_eq!(prob_area_index(pt(0.85, 0.5), p, q, 100), None);
        assert_eq!(prob_area_index(pt(0.1, 0.5), p, q, 100), None);
    }

    #[test]
    fn area_estimate_reproducible() {
        let (p, q, r) = (pt(0.3, 0.5), pt(0.6, 0.5), pt(0.5, 0.6));
        let a = estimate_hyperbola_area(p, q, r, 1_000_000, 17).unwrap();
        let b = estimate_hyperbola_area(p, q, r, 1_000_000, 17).unwrap();
        assert_eq!(a, b);
        assert!(a.area > 0.0 && a.std_error > 0.0);
        assert!(estimate_hyperbola_area(p, q, r, 100, 17).is_err());
        // With r = q only the ray beyond q qualifies, a null set.
        let degenerate = estimate_hyperbola_area(p, q, q, 10_000, 1).unwrap();
        assert!(degenerate.area < 1e-3);
    }

    #[test]
    fn smallest_detours_match_sorting() {
        let inst = Instance::generate(2000, &crate::instance::DensitySpec::Uniform, 8).unwrap();
        for (p, q) in [(0, 1), (5, 900), (17, 18)] {
            let (pp, qp) = (inst.point(p), inst.point(q));
            let mut all: Vec<(f64, usize)> = (0..inst.n())
                .filter(|&z| z != p && z != q)
                .map(|z| (dist(pp, inst.point(z)) + dist(inst.point(z), qp), z))
                .collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let want: Vec<usize> = all.iter().take(12).map(|&(_, z)| z).collect();
            assert_eq!(smallest_detours(&inst, p, q, 12), want);
        }
    }

    #[test]
    fn nearest_k_agrees_with_exhaustive_search() {
        let inst = Instance::generate(400, &crate::instance::DensitySpec::Uniform, 2).unwrap();
        let all = JvParams { witness_strategy: WitnessStrategy::AllVertices, ..JvParams::for_n(400) };
        let some = JvParams { witness_strategy: WitnessStrategy::NearestK(10), ..all };
        for (p, q) in crate::harness::sample_pairs(400, 300, 4) {
            let a = jv_edge_useless(&inst, p, q, &all).unwrap();
            let b = jv_edge_useless(&inst, p, q, &some).unwrap();
            if b.is_some() {
                assert!(a.is_some());
            }
        }
    }

    #[test]
    fn params_validation() {
        assert_eq!(JvParams::for_n(2000).witness_strategy, WitnessStrategy::AllVertices);
        assert_eq!(JvParams::for_n(2001).witness_strategy, WitnessStrategy::NearestK(10));
        let mut p = JvParams::for_n(10);
        p.alpha = 0.5;
        assert!(p.validate().is_err());
    }
}
