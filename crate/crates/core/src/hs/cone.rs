use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle, circle_circle_intersection, clamped_acos, dist, ray_circle_point, Point, EPS};

/// Which endpoint of the edge a cone belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeSide {
    /// Directions from the apex that lead away from `q`.
    P,
    /// Directions from the apex that lead away from `p`.
    Q,
}

/// The cone at apex `r` for edge `pq`: directions `t` whose point at distance
/// `delta` from `r` is at least `threshold` away from the far endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cone {
    pub apex: Point,
    pub p: Point,
    pub q: Point,
    pub delta: f64,
    pub side: ConeSide,
}

impl Cone {
    pub fn new(p: Point, q: Point, apex: Point, delta: f64, side: ConeSide) -> Self {
        Cone { apex, p, q, delta, side }
    }

    pub fn p_cone(p: Point, q: Point, apex: Point, delta: f64) -> Self {
        Self::new(p, q, apex, delta, ConeSide::P)
    }

    pub fn q_cone(p: Point, q: Point, apex: Point, delta: f64) -> Self {
        Self::new(p, q, apex, delta, ConeSide::Q)
    }

    /// The endpoint the cone points towards.
    pub fn near(&self) -> Point {
        match self.side {
            ConeSide::P => self.p,
            ConeSide::Q => self.q,
        }
    }

    /// The endpoint distances are measured from.
    pub fn far(&self) -> Point {
        match self.side {
            ConeSide::P => self.q,
            ConeSide::Q => self.p,
        }
    }

    pub fn threshold(&self) -> f64 {
        self.delta + dist(self.p, self.q) - dist(self.near(), self.apex)
    }

    /// Whether the two boundary circles meet, i.e. the cone is a proper arc.
    pub fn has_arc(&self) -> bool {
        let slack = dist(self.p, self.apex) + dist(self.apex, self.q) - dist(self.p, self.q);
        slack < 2.0 * self.delta
    }
}

/// Signed membership margin: `dist(far, t_r) - threshold`, nonnegative iff
/// `t` lies in the cone.
pub fn cone_margin(cone: &Cone, t: Point) -> Result<f64> {
    if !(cone.delta > 0.0) {
        return Err(Error::InvalidRadius(cone.delta));
    }
    let on_circle = ray_circle_point(cone.apex, t, cone.delta)?;
    Ok(dist(cone.far(), on_circle) - cone.threshold())
}

pub fn cone_contains(cone: &Cone, t: Point) -> Result<bool> {
    Ok(cone_margin(cone, t)? >= 0.0)
}

/// The two ends of the cone's arc on the `delta` circle around the apex.
pub fn cone_arc_endpoints(cone: &Cone) -> Result<(Point, Point)> {
    if !(cone.delta > 0.0) {
        return Err(Error::InvalidRadius(cone.delta));
    }
    if !cone.has_arc() {
        return Err(Error::NoArc);
    }
    let threshold = cone.threshold();
    if !(threshold > 0.0) {
        return Err(Error::NoArc);
    }
    let pts = circle_circle_intersection(cone.apex, cone.delta, cone.far(), threshold)
        .map_err(|e| match e {
            Error::InfiniteIntersection => e,
            _ => Error::NoArc,
        })?;
    match pts.as_slice() {
        [a, b] => Ok((*a, *b)),
        [a] => Ok((*a, *a)),
        _ => Err(Error::NoArc),
    }
}

/// Angular width of the cone, from the cosine law at an arc endpoint.
pub fn cone_angle(cone: &Cone) -> Result<f64> {
    if !(cone.delta > 0.0) {
        return Err(Error::InvalidRadius(cone.delta));
    }
    if !cone.has_arc() {
        return Err(Error::NoArc);
    }
    let d_far = dist(cone.apex, cone.far());
    if d_far < EPS {
        return Err(Error::DegenerateAngle);
    }
    let thr = cone.threshold();
    let cos = (cone.delta * cone.delta + d_far * d_far - thr * thr) / (2.0 * cone.delta * d_far);
    let at_endpoint = clamped_acos(cos);
    Ok(2.0 * (std::f64::consts::PI - at_endpoint))
}

/// Lower bound on the angle between the two tour neighbours of a vertex that
/// is `delta`-alone, in any optimal tour through `pq`.
pub fn min_neighbor_angle(p: Point, q: Point, r: Point, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidRadius(delta));
    }
    let slack = dist(p, r) + dist(r, q) - dist(p, q);
    if slack > 2.0 * delta {
        return Err(Error::NotApplicable(format!(
            "detour {slack} exceeds twice the radius {delta}"
        )));
    }
    let gap = 2.0 * delta - slack;
    Ok(clamped_acos(1.0 - gap * gap / (2.0 * delta * delta)))
}

/// Sufficient condition for `r` to be a potential point of `pq`: each cone is
/// narrower than the smallest possible angle between `r`'s tour neighbours.
/// Whether `r` is `delta`-alone is not checked here.
pub fn cones_separate_neighbors(p: Point, q: Point, r: Point, delta: f64, eps: f64) -> bool {
    let cp = Cone::p_cone(p, q, r, delta);
    if !cp.has_arc() {
        return false;
    }
    let Ok(bound) = min_neighbor_angle(p, q, r, delta) else {
        return false;
    };
    let Ok(angle_p) = cone_angle(&cp) else {
        return false;
    };
    let Ok(angle_q) = cone_angle(&Cone::q_cone(p, q, r, delta)) else {
        return false;
    };
    angle_p < bound - eps && angle_q < bound - eps
}

/// Points on the two cone arcs farthest from `p` and from `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalPoints {
    pub r_p: Point,
    pub r_q: Point,
}

/// The distance to `p` along the circle peaks at the antipode of `p`, so the
/// farthest arc point is either that antipode or an arc end. A borderline
/// antipode counts as on the arc, which can only overstate the distance.
fn extremal_on_arc(cone: &Cone) -> Result<Point> {
    let (a, b) = cone_arc_endpoints(cone)?;
    let near = cone.near();
    let apex = cone.apex;
    if dist(near, apex) >= EPS {
        let away = apex + (apex - near);
        let antipode = ray_circle_point(apex, away, cone.delta)?;
        if cone_margin(cone, antipode)? >= -1e-9 * cone.delta {
            return Ok(antipode);
        }
    }
    Ok(if dist(near, b) > dist(near, a) { b } else { a })
}

pub fn extremal_points(p: Point, q: Point, r: Point, delta: f64) -> Result<ExtremalPoints> {
    Ok(ExtremalPoints {
        r_p: extremal_on_arc(&Cone::p_cone(p, q, r, delta))?,
        r_q: extremal_on_arc(&Cone::q_cone(p, q, r, delta))?,
    })
}

/// Angle at `r` between the two arc ends, computed from the endpoints.
pub fn arc_span(cone: &Cone) -> Result<f64> {
    let (a, b) = cone_arc_endpoints(cone)?;
    if dist(a, b) < EPS {
        return Ok(0.0);
    }
    let inner = angle(a, cone.apex, b)?;
    // The arc faces away from the far endpoint; when it is wider than a half
    // circle the inner angle is its complement.
    let mid = cone.apex + ((a - cone.apex) + (b - cone.apex)) * 0.5;
    if dist(mid, cone.apex) > EPS && cone_margin(cone, mid)? < 0.0 {
        Ok(2.0 * std::f64::consts::PI - inner)
    } else {
        Ok(inner)
    }
}
