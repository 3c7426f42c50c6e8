//! Plane geometry: points, triples of distinct points, lines, Menger
//! curvature, and the angle-based filters used to select well-shaped
//! triangles.
//!
//! Curvature is computed from the triangle area and side lengths, so it is
//! exactly zero on detected-collinear triples and exactly symmetric in its
//! three arguments (inputs are canonically ordered before evaluation).

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Absolute collinearity threshold: a triple counts as collinear when the
/// cross product of two side vectors is at most this factor times the
/// squared diameter. Below it, curvature is exactly 0 and the circumradius
/// infinite.
pub const COLLINEAR_CROSS_TOL: f64 = 1e-14;

#[derive(Debug, Error, PartialEq, Eq, Clone, Copy)]
pub enum GeomError {
    /// A triple needs three pairwise-distinct finite points.
    #[error("triple requires three pairwise distinct finite points")]
    InvalidTriple,
    /// A line needs two distinct finite points.
    #[error("line requires two distinct finite points")]
    CoincidentPoints,
}

/// A point of the plane, also used as a complex number `re + i*im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub re: f64,
    pub im: f64,
}

impl PlanePoint {
    pub const ZERO: PlanePoint = PlanePoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        PlanePoint { re, im }
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn norm_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(self, other: PlanePoint) -> f64 {
        (self - other).norm()
    }

    pub fn conj(self) -> PlanePoint {
        PlanePoint::new(self.re, -self.im)
    }

    /// Cross product of `self` and `other` as plane vectors.
    pub fn cross(self, other: PlanePoint) -> f64 {
        self.re * other.im - self.im * other.re
    }

    pub fn dot(self, other: PlanePoint) -> f64 {
        self.re * other.re + self.im * other.im
    }

    /// Complex multiplication.
    pub fn cmul(self, other: PlanePoint) -> PlanePoint {
        PlanePoint::new(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )
    }

    /// Complex reciprocal `1/self`; the caller keeps `self != 0`.
    pub fn cinv(self) -> PlanePoint {
        let n = self.norm_sq();
        PlanePoint::new(self.re / n, -self.im / n)
    }
}

impl Add for PlanePoint {
    type Output = PlanePoint;
    fn add(self, rhs: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for PlanePoint {
    type Output = PlanePoint;
    fn sub(self, rhs: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for PlanePoint {
    type Output = PlanePoint;
    fn neg(self) -> PlanePoint {
        PlanePoint::new(-self.re, -self.im)
    }
}

impl Mul<f64> for PlanePoint {
    type Output = PlanePoint;
    fn mul(self, rhs: f64) -> PlanePoint {
        PlanePoint::new(self.re * rhs, self.im * rhs)
    }
}

impl From<(f64, f64)> for PlanePoint {
    fn from((re, im): (f64, f64)) -> Self {
        PlanePoint::new(re, im)
    }
}

impl Serialize for PlanePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&self.re)?;
        seq.serialize_element(&self.im)?;
        seq.end()
    }
}

/// Three pairwise-distinct finite points. The constructor validates, so a
/// `Triple` can always be fed to curvature and permutation evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple {
    a: PlanePoint,
    b: PlanePoint,
    c: PlanePoint,
}

impl Triple {
    pub fn new(a: PlanePoint, b: PlanePoint, c: PlanePoint) -> Result<Triple, GeomError> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(GeomError::InvalidTriple);
        }
        if a.dist(b) == 0.0 || a.dist(c) == 0.0 || b.dist(c) == 0.0 {
            return Err(GeomError::InvalidTriple);
        }
        Ok(Triple { a, b, c })
    }

    pub fn from_coords(coords: [f64; 6]) -> Result<Triple, GeomError> {
        Triple::new(
            PlanePoint::new(coords[0], coords[1]),
            PlanePoint::new(coords[2], coords[3]),
            PlanePoint::new(coords[4], coords[5]),
        )
    }

    pub fn a(&self) -> PlanePoint {
        self.a
    }

    pub fn b(&self) -> PlanePoint {
        self.b
    }

    pub fn c(&self) -> PlanePoint {
        self.c
    }

    pub fn points(&self) -> [PlanePoint; 3] {
        [self.a, self.b, self.c]
    }

    /// The three points in a canonical order (lexicographic by `(re, im)`),
    /// shared by every evaluation that promises exact symmetry under
    /// argument permutation.
    pub fn canonical_points(&self) -> [PlanePoint; 3] {
        let mut pts = self.points();
        pts.sort_by(|p, q| {
            p.re.total_cmp(&q.re).then_with(|| p.im.total_cmp(&q.im))
        });
        pts
    }

    /// Side lengths of the canonical ordering: `|p0-p1|, |p0-p2|, |p1-p2|`.
    pub fn canonical_sides(&self) -> [f64; 3] {
        let [p0, p1, p2] = self.canonical_points();
        [p0.dist(p1), p0.dist(p2), p1.dist(p2)]
    }

    pub fn diameter(&self) -> f64 {
        let s = self.canonical_sides();
        s[0].max(s[1]).max(s[2])
    }

    pub fn min_gap(&self) -> f64 {
        let s = self.canonical_sides();
        s[0].min(s[1]).min(s[2])
    }

    pub fn translate(&self, by: PlanePoint) -> Triple {
        Triple {
            a: self.a + by,
            b: self.b + by,
            c: self.c + by,
        }
    }

    pub fn scale(&self, by: f64) -> Result<Triple, GeomError> {
        Triple::new(self.a * by, self.b * by, self.c * by)
    }
}

impl Serialize for Triple {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(3))?;
        seq.serialize_element(&self.a)?;
        seq.serialize_element(&self.b)?;
        seq.serialize_element(&self.c)?;
        seq.end()
    }
}

/// An unoriented line, stored as a direction angle in `[0, pi)` plus a
/// point it passes through.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line {
    pub angle: f64,
    pub anchor: PlanePoint,
}

/// Folds a direction angle from `atan2` range into `[0, pi)`; an input of
/// exactly `pi` maps to `0`.
pub(crate) fn normalize_line_angle(raw: f64) -> f64 {
    let a = if raw < 0.0 { raw + PI } else { raw };
    if a >= PI {
        a - PI
    } else {
        a
    }
}

/// The line through two distinct points.
pub fn line_through(p: PlanePoint, q: PlanePoint) -> Result<Line, GeomError> {
    if !(p.is_finite() && q.is_finite()) || p.dist(q) == 0.0 {
        return Err(GeomError::CoincidentPoints);
    }
    let d = q - p;
    Ok(Line {
        angle: normalize_line_angle(d.im.atan2(d.re)),
        anchor: p,
    })
}

/// Angle between a line and the vertical direction, in `[0, pi/2]`.
/// Horizontal lines give `pi/2`, vertical lines give `0`.
pub fn theta_v(line: &Line) -> f64 {
    (line.angle - FRAC_PI_2).abs()
}

/// Angle between two unoriented lines, in `[0, pi/2]`.
pub fn angle_between(l1: &Line, l2: &Line) -> f64 {
    let d = (l1.angle - l2.angle).abs();
    d.min(PI - d)
}

/// Distance from a point to a line.
pub fn dist_point_line(p: PlanePoint, line: &Line) -> f64 {
    let dir = PlanePoint::new(line.angle.cos(), line.angle.sin());
    (p - line.anchor).cross(dir).abs()
}

/// Twice the signed area of the canonical ordering, plus the canonical
/// side lengths. Shared by curvature and circumradius so both see the same
/// collinearity decision.
fn canonical_cross_and_sides(t: &Triple) -> (f64, [f64; 3]) {
    let [p0, p1, p2] = t.canonical_points();
    let cross = (p1 - p0).cross(p2 - p0);
    (cross, [p0.dist(p1), p0.dist(p2), p1.dist(p2)])
}

fn is_collinear(cross: f64, diameter: f64) -> bool {
    cross.abs() <= COLLINEAR_CROSS_TOL * diameter * diameter
}

/// Menger curvature `c(z1,z2,z3)`: the reciprocal circumradius, computed
/// as `4 * Area / (product of side lengths)`. Exactly `0` on collinear
/// triples, and exactly symmetric under argument permutation.
pub fn menger_curvature(t: &Triple) -> f64 {
    let (cross, sides) = canonical_cross_and_sides(t);
    let diam = sides[0].max(sides[1]).max(sides[2]);
    if is_collinear(cross, diam) {
        return 0.0;
    }
    2.0 * cross.abs() / (sides[0] * sides[1] * sides[2])
}

/// Circumradius of the triangle; `f64::INFINITY` on collinear triples.
pub fn circumradius(t: &Triple) -> f64 {
    let (cross, sides) = canonical_cross_and_sides(t);
    let diam = sides[0].max(sides[1]).max(sides[2]);
    if is_collinear(cross, diam) {
        return f64::INFINITY;
    }
    sides[0] * sides[1] * sides[2] / (2.0 * cross.abs())
}

/// Smallest angle at the first vertex: the angle between the lines from
/// `a` to `b` and from `a` to `c`, in `[0, pi/2]`.
pub fn smallest_angle_at(t: &Triple) -> f64 {
    let lab = line_through(t.a, t.b).expect("triple points are distinct");
    let lac = line_through(t.a, t.c).expect("triple points are distinct");
    angle_between(&lab, &lac)
}

/// Whether all pairwise side-length ratios are at most `tau`
/// (the comparability class of triangles). Boundary values are inside.
pub fn in_comparable_class(t: &Triple, tau: f64) -> bool {
    let s = t.canonical_sides();
    let dmax = s[0].max(s[1]).max(s[2]);
    let dmin = s[0].min(s[1]).min(s[2]);
    dmax / dmin <= tau
}

/// The two vertical-angle budget checks for a triple, given a floor
/// `alpha0` in `(0, pi/2)`. With `S` the sum of the angles to vertical of
/// the three side lines, returns `(S >= alpha0, S <= 3*pi/2 - alpha0)`.
pub fn delta_conditions(t: &Triple, alpha0: f64) -> (bool, bool) {
    let sum = theta_v_sum(t);
    (sum >= alpha0, sum <= 1.5 * PI - alpha0)
}

/// Sum of the angles to vertical over the three side lines.
pub fn theta_v_sum(t: &Triple) -> f64 {
    let lab = line_through(t.a, t.b).expect("triple points are distinct");
    let lbc = line_through(t.b, t.c).expect("triple points are distinct");
    let lac = line_through(t.a, t.c).expect("triple points are distinct");
    theta_v(&lab) + theta_v(&lbc) + theta_v(&lac)
}
