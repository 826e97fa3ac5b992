//! Planar primitives shared by both elimination criteria.
//!
//! Everything is plain `f64`. Degeneracy tests use the single tolerance [`EPS`];
//! the criteria built on top only eliminate an edge when their strict
//! inequalities hold by a margin, so rounding here can cost eliminations but
//! never soundness.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Global tolerance for equality and degeneracy tests.
pub const EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Validating constructor: rejects NaN and infinities.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Point { x, y })
        } else {
            Err(Error::NonFinite { x, y })
        }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    /// Counter-clockwise rotation by 90 degrees.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn in_unit_square(self) -> bool {
        (0.0..=1.0).contains(&self.x) && (0.0..=1.0).contains(&self.y)
    }

    /// Distance to the boundary of the unit square (negative outside).
    pub fn unit_square_clearance(self) -> f64 {
        self.x.min(self.y).min(1.0 - self.x).min(1.0 - self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

pub fn dist(a: Point, b: Point) -> f64 {
    (a - b).norm()
}

/// A segment with distinct endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    p: Point,
    q: Point,
}

impl Segment {
    pub fn new(p: Point, q: Point) -> Result<Self> {
        if dist(p, q) <= 0.0 {
            return Err(Error::DegenerateSegment);
        }
        Ok(Segment { p, q })
    }

    pub fn p(&self) -> Point {
        self.p
    }

    pub fn q(&self) -> Point {
        self.q
    }

    pub fn length(&self) -> f64 {
        dist(self.p, self.q)
    }
}

/// Coordinates relative to the line through a segment `pq`: the abscissa is
/// measured from `p` along `q - p`, the ordinate is the signed offset (positive
/// to the left of `p -> q`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedFrame {
    segment: Segment,
    dir: Point,
    normal: Point,
    length: f64,
}

impl ProjectedFrame {
    pub fn new(segment: Segment) -> Self {
        let d = segment.q - segment.p;
        let length = d.norm();
        let dir = d * (1.0 / length);
        ProjectedFrame {
            segment,
            dir,
            normal: dir.perp(),
            length,
        }
    }

    pub fn from_points(p: Point, q: Point) -> Result<Self> {
        Segment::new(p, q).map(ProjectedFrame::new)
    }

    pub fn segment(&self) -> Segment {
        self.segment
    }

    pub fn p(&self) -> Point {
        self.segment.p
    }

    pub fn q(&self) -> Point {
        self.segment.q
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Unit vector from `p` towards `q`.
    pub fn direction(&self) -> Point {
        self.dir
    }

    /// Unit normal, left of `p -> q`.
    pub fn normal(&self) -> Point {
        self.normal
    }

    pub fn along(&self, x: Point) -> f64 {
        (x - self.segment.p).dot(self.dir)
    }

    pub fn signed_offset(&self, x: Point) -> f64 {
        (x - self.segment.p).dot(self.normal)
    }

    /// Distance from `x` to the (infinite) line `pq`.
    pub fn dist_to_line(&self, x: Point) -> f64 {
        self.signed_offset(x).abs()
    }

    /// Point with the given frame coordinates.
    pub fn at(&self, along: f64, offset: f64) -> Point {
        self.segment.p + self.dir * along + self.normal * offset
    }

    /// Foot of the perpendicular from `x` onto the line `pq`.
    pub fn project(&self, x: Point) -> Point {
        self.segment.p + self.dir * self.along(x)
    }

    /// Distance between the projections of `a` and `b`.
    pub fn dist_x(&self, a: Point, b: Point) -> f64 {
        (self.along(a) - self.along(b)).abs()
    }

    /// Difference of the unsigned distances to the line. Mirror images across
    /// `pq` have `dist_y == 0`.
    pub fn dist_y(&self, a: Point, b: Point) -> f64 {
        (self.dist_to_line(a) - self.dist_to_line(b)).abs()
    }
}

/// The point at distance `delta` from `r` on the ray `r -> t`.
pub fn ray_circle_point(r: Point, t: Point, delta: f64) -> Result<Point> {
    if !(delta > 0.0) {
        return Err(Error::InvalidRadius(delta));
    }
    let d = t - r;
    let len = d.norm();
    if len <= 0.0 {
        return Err(Error::DegenerateRay);
    }
    Ok(r + d * (delta / len))
}

/// Intersection of two circles.
///
/// Two-point results are ordered with the point left of the directed line
/// `c1 -> c2` first. Near-tangent configurations (within [`EPS`] relative to the
/// radii) collapse to a single point.
pub fn circle_circle_intersection(c1: Point, r1: f64, c2: Point, r2: f64) -> Result<Vec<Point>> {
    if !(r1 > 0.0) {
        return Err(Error::InvalidRadius(r1));
    }
    if !(r2 > 0.0) {
        return Err(Error::InvalidRadius(r2));
    }
    let d = dist(c1, c2);
    let tol = EPS * (r1 + r2).max(1.0);
    if d <= EPS {
        if (r1 - r2).abs() <= tol {
            return Err(Error::InfiniteIntersection);
        }
        return Ok(Vec::new());
    }
    if d > r1 + r2 + tol || d < (r1 - r2).abs() - tol {
        return Ok(Vec::new());
    }
    let u = (c2 - c1) * (1.0 / d);
    let a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h2 = r1 * r1 - a * a;
    let base = c1 + u * a;
    if h2 <= 0.0 {
        return Ok(vec![base]);
    }
    let h = h2.sqrt();
    let n = u.perp();
    Ok(vec![base + n * h, base - n * h])
}

/// Angle `a-vertex-b` in `[0, pi]`.
pub fn angle(a: Point, vertex: Point, b: Point) -> Result<f64> {
    let u = a - vertex;
    let w = b - vertex;
    let nu = u.norm();
    let nw = w.norm();
    if nu <= 0.0 || nw <= 0.0 {
        return Err(Error::DegenerateAngle);
    }
    Ok(clamped_acos(u.dot(w) / (nu * nw)))
}

pub(crate) fn clamped_acos(c: f64) -> f64 {
    c.clamp(-1.0, 1.0).acos()
}

/// Reflection of `x` across the line through `a` and `b`.
pub fn reflect_across_line(x: Point, a: Point, b: Point) -> Result<Point> {
    let frame = ProjectedFrame::from_points(a, b)?;
    let foot = frame.project(x);
    Ok(foot * 2.0 - x)
}
