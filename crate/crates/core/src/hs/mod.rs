//! Pair-of-vertices edge elimination: two isolated vertices near the middle
//! of an edge certify that the edge is in no optimal tour.

mod cone;
mod region;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

pub use cone::{
    arc_span, cone_angle, cone_arc_endpoints, cone_contains, cone_margin,
    cones_separate_neighbors, extremal_points, min_neighbor_angle, Cone, ConeSide,
    ExtremalPoints,
};
pub use region::{
    canonical_region_count, canonical_test_regions, region_status, RegionStatus, TestRegion,
};

use crate::error::{Error, Result};
use crate::geometry::{dist, Point};
use crate::instance::Instance;

/// How the radius used by the pair test is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaRule {
    /// Always `HsParams::delta`.
    #[default]
    Fixed,
    /// The smaller nearest-neighbour distance of the two candidates, so both
    /// are isolated at that radius by construction.
    PairAdaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsParams {
    pub delta: f64,
    /// Edges shorter than `gamma_bar * delta` get no canonical regions.
    pub gamma_bar: f64,
    /// Budget of regions (and of candidate pairs) per edge.
    pub f_n: usize,
    pub eps_margin: f64,
    #[serde(default)]
    pub delta_rule: DeltaRule,
}

impl HsParams {
    pub fn for_n(n: usize) -> Self {
        let n = n.max(1) as f64;
        HsParams {
            delta: 1.0 / n.sqrt(),
            gamma_bar: 24.0,
            f_n: n.sqrt().ceil() as usize,
            eps_margin: 1e-12,
            delta_rule: DeltaRule::Fixed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidConfig(format!("delta must be positive, got {}", self.delta)));
        }
        if !(self.gamma_bar >= 24.0) {
            return Err(Error::InvalidConfig(format!(
                "gamma_bar must be at least 24, got {}",
                self.gamma_bar
            )));
        }
        if self.f_n == 0 {
            return Err(Error::InvalidConfig("f_n must be at least 1".into()));
        }
        if !(self.eps_margin >= 0.0) {
            return Err(Error::InvalidConfig("eps_margin must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HsMode {
    /// Try pairs of vertices nearest to evenly spaced points on the edge.
    #[default]
    PairSearch,
    /// Only strongly certifying canonical test regions, re-checked by the pair test.
    CanonicalRegion,
}

impl HsMode {
    pub fn name(self) -> &'static str {
        match self {
            HsMode::PairSearch => "pair-search",
            HsMode::CanonicalRegion => "canonical-region",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "pair-search" | "pair" => Ok(HsMode::PairSearch),
            "canonical-region" | "canonical" => Ok(HsMode::CanonicalRegion),
            _ => Err(Error::InvalidConfig(format!("unknown hs mode '{name}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessSource {
    PairSearch,
    CanonicalRegion { index: usize },
}

/// A certifying pair, replayable with [`HsWitness::replay`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsWitness {
    pub r: usize,
    pub s: usize,
    pub delta: f64,
    pub extremal_r: ExtremalPoints,
    pub extremal_s: ExtremalPoints,
    pub source: WitnessSource,
}

impl HsWitness {
    pub fn replay(&self, inst: &Instance, p: usize, q: usize, eps: f64) -> bool {
        pair_eliminates_at(inst, p, q, self.r, self.s, self.delta, eps).is_some()
    }
}

pub fn is_delta_alone(inst: &Instance, i: usize, delta: f64) -> bool {
    inst.nn_distances()[i] >= delta
}

/// Sufficient test for `r` being a potential point of `pq`.
pub fn is_potential_point(inst: &Instance, p: usize, q: usize, r: usize, params: &HsParams) -> bool {
    is_delta_alone(inst, r, params.delta)
        && cones_separate_neighbors(
            inst.point(p),
            inst.point(q),
            inst.point(r),
            params.delta,
            params.eps_margin,
        )
}

fn outside_both_cones(p: Point, q: Point, apex: Point, delta: f64, x: Point, eps: f64) -> bool {
    [Cone::p_cone(p, q, apex, delta), Cone::q_cone(p, q, apex, delta)]
        .iter()
        .all(|c| matches!(cone_margin(c, x), Ok(m) if m < -eps))
}

/// The pair test at radius `delta`. Returns the extremal points of `r` and `s`
/// when every condition holds with margin `eps`.
pub fn pair_eliminates_at(
    inst: &Instance,
    p: usize,
    q: usize,
    r: usize,
    s: usize,
    delta: f64,
    eps: f64,
) -> Option<(ExtremalPoints, ExtremalPoints)> {
    let n = inst.n();
    if p >= n || q >= n || r >= n || s >= n || p == q || r == s {
        return None;
    }
    if [r, s].iter().any(|&v| v == p || v == q) || !(delta > 0.0) {
        return None;
    }
    if !is_delta_alone(inst, r, delta) || !is_delta_alone(inst, s, delta) {
        return None;
    }
    let (pp, qp, rp, sp) = (inst.point(p), inst.point(q), inst.point(r), inst.point(s));
    if !cones_separate_neighbors(pp, qp, rp, delta, eps)
        || !cones_separate_neighbors(pp, qp, sp, delta, eps)
    {
        return None;
    }
    if !outside_both_cones(pp, qp, rp, delta, sp, eps)
        || !outside_both_cones(pp, qp, sp, delta, rp, eps)
    {
        return None;
    }
    let er = extremal_points(pp, qp, rp, delta).ok()?;
    let es = extremal_points(pp, qp, sp, delta).ok()?;
    let base = dist(pp, qp) - dist(rp, sp) + 2.0 * delta;
    let first = base - dist(pp, er.r_p) - dist(es.r_q, qp);
    let second = base - dist(pp, es.r_p) - dist(er.r_q, qp);
    (first > eps && second > eps).then_some((er, es))
}

/// The pair test at the radius given by `params`.
pub fn pair_eliminates(
    inst: &Instance,
    p: usize,
    q: usize,
    r: usize,
    s: usize,
    params: &HsParams,
) -> bool {
    pair_eliminates_at(inst, p, q, r, s, params.delta, params.eps_margin).is_some()
}

fn pair_delta(inst: &Instance, r: usize, s: usize, params: &HsParams) -> f64 {
    match params.delta_rule {
        DeltaRule::Fixed => params.delta,
        DeltaRule::PairAdaptive => {
            let nn = inst.nn_distances();
            nn[r].min(nn[s])
        }
    }
}

/// Decides whether `pq` is eliminated; on success returns the certifying pair.
pub fn hs_edge_useless(
    inst: &Instance,
    p: usize,
    q: usize,
    params: &HsParams,
    mode: HsMode,
) -> Result<Option<HsWitness>> {
    if inst.n() < 5 {
        return Err(Error::SizeOutOfRange { n: inst.n(), min: 5, max: usize::MAX });
    }
    inst.check_index(p)?;
    inst.check_index(q)?;
    if p == q {
        return Err(Error::DegenerateSegment);
    }
    Ok(match mode {
        HsMode::CanonicalRegion => canonical_witness(inst, p, q, params),
        HsMode::PairSearch => pair_search_witness(inst, p, q, params),
    })
}

fn canonical_witness(inst: &Instance, p: usize, q: usize, params: &HsParams) -> Option<HsWitness> {
    let regions = canonical_test_regions(inst.point(p), inst.point(q), params);
    regions.iter().enumerate().find_map(|(index, region)| {
        let RegionStatus::StronglyCertifying { upper, lower } = region_status(region, inst, p, q)
        else {
            return None;
        };
        let (er, es) =
            pair_eliminates_at(inst, p, q, upper, lower, params.delta, params.eps_margin)?;
        Some(HsWitness {
            r: upper,
            s: lower,
            delta: params.delta,
            extremal_r: er,
            extremal_s: es,
            source: WitnessSource::CanonicalRegion { index },
        })
    })
}

/// Candidate pairs: the two vertices nearest to each of `f_n` evenly spaced
/// points on the middle half of the edge, deduplicated, at most `f_n` pairs.
fn pair_search_witness(inst: &Instance, p: usize, q: usize, params: &HsParams) -> Option<HsWitness> {
    let (pp, qp) = (inst.point(p), inst.point(q));
    let budget = params.f_n;
    let mut seen = HashSet::new();
    for k in 0..budget {
        let t = 0.25 + 0.5 * (k as f64 + 0.5) / budget as f64;
        let probe = pp + (qp - pp) * t;
        let near = inst.nearest_to(probe, 2, |i| i == p || i == q);
        let [(_, a), (_, b)] = near[..] else {
            return None;
        };
        let pair = (a.min(b), a.max(b));
        if !seen.insert(pair) {
            continue;
        }
        let delta = pair_delta(inst, pair.0, pair.1, params);
        if let Some((er, es)) =
            pair_eliminates_at(inst, p, q, pair.0, pair.1, delta, params.eps_margin)
        {
            return Some(HsWitness {
                r: pair.0,
                s: pair.1,
                delta,
                extremal_r: er,
                extremal_s: es,
                source: WitnessSource::PairSearch,
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Long horizontal edge with one vertex in each pocket of the first region
    /// and two far-away vertices.
    fn fixture() -> (Instance, HsParams) {
        let params = HsParams::for_n(10_000);
        let (p, q) = (Point::new(0.1, 0.5), Point::new(0.9, 0.5));
        let reg = canonical_test_regions(p, q, &params)[0];
        let c = reg.center;
        let up = Point::new(c.x, c.y + reg.side * 0.008);
        let low = Point::new(c.x, c.y - reg.side * 0.008);
        let inst = Instance::new(vec![p, q, up, low, Point::new(0.5, 0.05), Point::new(0.5, 0.95)])
            .unwrap();
        (inst, params)
    }

    #[test]
    fn params_defaults() {
        let pr = HsParams::for_n(1000);
        assert!((pr.delta - 1.0 / 1000f64.sqrt()).abs() < 1e-15);
        assert_eq!(pr.f_n, 32);
        assert_eq!(pr.gamma_bar, 24.0);
        pr.validate().unwrap();
        assert!(HsParams { gamma_bar: 10.0, ..pr }.validate().is_err());
        assert!(HsParams { f_n: 0, ..pr }.validate().is_err());
    }

    #[test]
    fn delta_alone_boundary() {
        let inst = Instance::from_coords(&[(0.1, 0.1), (0.2, 0.1), (0.9, 0.9)]).unwrap();
        let d = inst.nearest_neighbor_distance(0).unwrap();
        assert!(is_delta_alone(&inst, 0, d));
        assert!(is_delta_alone(&inst, 1, d));
        assert!(!is_delta_alone(&inst, 0, d * 1.0000001));
    }

    #[test]
    fn pair_in_pockets_eliminates() {
        let (inst, params) = fixture();
        assert!(is_potential_point(&inst, 0, 1, 2, &params));
        assert!(is_potential_point(&inst, 0, 1, 3, &params));
        assert!(pair_eliminates(&inst, 0, 1, 2, 3, &params));
        assert!(!pair_eliminates(&inst, 0, 1, 2, 2, &params));
        let w = hs_edge_useless(&inst, 0, 1, &params, HsMode::CanonicalRegion)
            .unwrap()
            .unwrap();
        assert_eq!((w.r, w.s), (2, 3));
        assert_eq!(w.source, WitnessSource::CanonicalRegion { index: 0 });
        assert!(w.replay(&inst, 0, 1, params.eps_margin));
    }

    #[test]
    fn far_apart_pair_fails() {
        let params = HsParams::for_n(10_000);
        let inst = Instance::from_coords(&[(0.1, 0.5), (0.2, 0.5), (0.15, 0.9), (0.15, 0.1), (0.9, 0.9)])
            .unwrap();
        assert!(!pair_eliminates(&inst, 0, 1, 2, 3, &params));
    }

    #[test]
    fn far_apex_is_not_potential() {
        let params = HsParams::for_n(10_000);
        let inst = Instance::from_coords(&[(0.1, 0.5), (0.9, 0.5), (0.5, 0.8), (0.2, 0.2), (0.9, 0.1)])
            .unwrap();
        assert!(!is_potential_point(&inst, 0, 1, 2, &params));
    }

    #[test]
    fn empty_neighborhood_keeps_edge() {
        let params = HsParams::for_n(5);
        let inst = Instance::from_coords(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.5, 1.0)])
            .unwrap();
        for mode in [HsMode::CanonicalRegion, HsMode::PairSearch] {
            assert!(hs_edge_useless(&inst, 0, 1, &params, mode).unwrap().is_none());
        }
    }

    #[test]
    fn too_small_instance_rejected() {
        let inst = Instance::from_coords(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]).unwrap();
        assert!(hs_edge_useless(&inst, 0, 1, &HsParams::for_n(4), HsMode::PairSearch).is_err());
    }

    #[test]
    fn pair_search_finds_pocket_pair() {
        let (inst, params) = fixture();
        let w = hs_edge_useless(&inst, 0, 1, &params, HsMode::PairSearch).unwrap().unwrap();
        assert_eq!((w.r, w.s), (2, 3));
        assert!(w.replay(&inst, 0, 1, params.eps_margin));
    }
}
