//! Planar geometry: vectors, poses, axis-aligned boxes, ray queries and
//! overlap resolution.
//!
//! Everything is `f64`. Comparisons that need slack use [`EPS`].

use core::f64::consts::PI;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// Absolute geometric tolerance in meters.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector at `angle` radians from +x.
    pub fn from_angle(angle: f64) -> Self {
        Vec2::new(libm::cos(angle), libm::sin(angle))
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (other - self).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Returns `None` for vectors shorter than [`EPS`].
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        if n > EPS {
            Some(Vec2::new(self.x / n, self.y / n))
        } else {
            None
        }
    }

    pub fn angle(self) -> f64 {
        libm::atan2(self.y, self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, rhs: Vec2) {
        self.x -= rhs.x;
        self.y -= rhs.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let two_pi = 2.0 * PI;
    let mut a = angle - two_pi * libm::floor((angle + PI) / two_pi);
    // floor can leave a == -π (or round up to π + ulp)
    if a <= -PI {
        a += two_pi;
    } else if a > PI {
        a -= two_pi;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pose {
    pub position: Vec2,
    /// Radians in `(-π, π]`.
    pub heading: f64,
}

impl Pose {
    pub fn new(position: Vec2, heading: f64) -> Self {
        Pose {
            position,
            heading: wrap_angle(heading),
        }
    }

    pub fn forward(&self) -> Vec2 {
        Vec2::from_angle(self.heading)
    }
}

/// Axis-aligned square obstacle.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AxisBox {
    pub center: Vec2,
    pub half_extent: f64,
}

impl AxisBox {
    pub fn new(center: Vec2, half_extent: f64) -> Self {
        debug_assert!(half_extent > 0.0);
        AxisBox {
            center,
            half_extent,
        }
    }

    pub fn min(&self) -> Vec2 {
        Vec2::new(
            self.center.x - self.half_extent,
            self.center.y - self.half_extent,
        )
    }

    pub fn max(&self) -> Vec2 {
        Vec2::new(
            self.center.x + self.half_extent,
            self.center.y + self.half_extent,
        )
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let d = p - self.center;
        libm::fabs(d.x) <= self.half_extent && libm::fabs(d.y) <= self.half_extent
    }

    pub fn closest_point(&self, p: Vec2) -> Vec2 {
        let lo = self.min();
        let hi = self.max();
        Vec2::new(p.x.clamp(lo.x, hi.x), p.y.clamp(lo.y, hi.y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Vec2,
    pub radius: f64,
}

impl Circle {
    pub const fn new(center: Vec2, radius: f64) -> Self {
        Circle { center, radius }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec2,
    pub direction: Vec2,
}

impl Ray {
    /// `direction` must be unit length.
    pub fn new(origin: Vec2, direction: Vec2) -> Self {
        debug_assert!((direction.norm() - 1.0).abs() <= 1e-9);
        Ray { origin, direction }
    }

    pub fn at(&self, t: f64) -> Vec2 {
        self.origin + self.direction * t
    }
}

/// Parametric interval `[t_enter, t_exit]` of the line `origin + t * dir`
/// inside the box, or `None` if the line misses it.
fn slab_interval(origin: Vec2, dir: Vec2, b: &AxisBox) -> Option<(f64, f64)> {
    let lo = b.min();
    let hi = b.max();
    let mut t0 = f64::NEG_INFINITY;
    let mut t1 = f64::INFINITY;
    for (o, d, l, h) in [(origin.x, dir.x, lo.x, hi.x), (origin.y, dir.y, lo.y, hi.y)] {
        if d == 0.0 {
            if o < l || o > h {
                return None;
            }
        } else {
            let inv = 1.0 / d;
            let (mut a, mut c) = ((l - o) * inv, (h - o) * inv);
            if a > c {
                core::mem::swap(&mut a, &mut c);
            }
            t0 = t0.max(a);
            t1 = t1.min(c);
            if t0 > t1 {
                return None;
            }
        }
    }
    Some((t0, t1))
}

/// Smallest `t >= 0` at which the ray touches the box. An origin inside the
/// box yields `Some(0.0)`.
pub fn ray_box_intersect(ray: &Ray, b: &AxisBox) -> Option<f64> {
    if b.contains(ray.origin) {
        return Some(0.0);
    }
    let (t0, t1) = slab_interval(ray.origin, ray.direction, b)?;
    if t1 < 0.0 {
        return None;
    }
    Some(t0.max(0.0))
}

/// Smallest `t >= 0` at which the ray touches the disc; `Some(0.0)` when the
/// origin is inside it.
pub fn ray_circle_intersect(ray: &Ray, c: &Circle) -> Option<f64> {
    let oc = ray.origin - c.center;
    let cc = oc.norm_sq() - c.radius * c.radius;
    if cc <= 0.0 {
        return Some(0.0);
    }
    let b = oc.dot(ray.direction);
    if b >= 0.0 {
        return None;
    }
    let disc = b * b - cc;
    if disc < 0.0 {
        return None;
    }
    Some(-b - libm::sqrt(disc))
}

/// Distance along the ray to the boundary of the square `[0, side]²`, for an
/// origin inside it.
pub fn ray_arena_exit(ray: &Ray, side: f64) -> f64 {
    let mut t = f64::INFINITY;
    for (o, d) in [(ray.origin.x, ray.direction.x), (ray.origin.y, ray.direction.y)] {
        if d > 0.0 {
            t = t.min((side - o) / d);
        } else if d < 0.0 {
            t = t.min(-o / d);
        }
    }
    t.max(0.0)
}

/// True iff some box meets the open segment `(p, q)`.
pub fn segment_occluded(p: Vec2, q: Vec2, boxes: &[AxisBox]) -> bool {
    let d = q - p;
    boxes.iter().any(|b| match slab_interval(p, d, b) {
        Some((t0, t1)) => t0.max(0.0) < t1.min(1.0),
        None => false,
    })
}

/// Overlap depth of two discs (negative when apart).
pub fn circle_circle_depth(a: &Circle, b: &Circle) -> f64 {
    a.radius + b.radius - a.center.distance(b.center)
}

/// Splits the overlap of two discs evenly; returns the displacement for
/// each. Coincident centers separate along x (`a` toward -x, `b` toward +x).
pub fn resolve_circle_circle(a: &Circle, b: &Circle) -> (Vec2, Vec2) {
    let delta = b.center - a.center;
    let dist = delta.norm();
    let depth = a.radius + b.radius - dist;
    if depth <= 0.0 {
        return (Vec2::ZERO, Vec2::ZERO);
    }
    let n = if dist > EPS {
        delta * (1.0 / dist)
    } else {
        Vec2::new(1.0, 0.0)
    };
    let half = depth * 0.5;
    (-n * half, n * half)
}

/// Overlap depth of a disc against a box (negative when apart). A center
/// inside the box counts the distance to the nearest face plus the radius.
pub fn circle_box_depth(c: &Circle, b: &AxisBox) -> f64 {
    let q = b.closest_point(c.center);
    let d = c.center - q;
    if d.x == 0.0 && d.y == 0.0 {
        let (face, _) = nearest_face(c.center, b);
        face + c.radius
    } else {
        c.radius - d.norm()
    }
}

// Distance to the nearest face and its outward normal; ties resolve in the
// order -x, +x, -y, +y.
fn nearest_face(p: Vec2, b: &AxisBox) -> (f64, Vec2) {
    let lo = b.min();
    let hi = b.max();
    let faces = [
        (p.x - lo.x, Vec2::new(-1.0, 0.0)),
        (hi.x - p.x, Vec2::new(1.0, 0.0)),
        (p.y - lo.y, Vec2::new(0.0, -1.0)),
        (hi.y - p.y, Vec2::new(0.0, 1.0)),
    ];
    let mut best = faces[0];
    for f in &faces[1..] {
        if f.0 < best.0 {
            best = *f;
        }
    }
    best
}

/// Minimal translation of the disc out of an immovable box.
pub fn resolve_circle_box(c: &Circle, b: &AxisBox) -> Vec2 {
    let q = b.closest_point(c.center);
    let d = c.center - q;
    if d.x == 0.0 && d.y == 0.0 {
        let (face, normal) = nearest_face(c.center, b);
        return normal * (face + c.radius);
    }
    let dist = d.norm();
    let depth = c.radius - dist;
    if depth <= 0.0 {
        return Vec2::ZERO;
    }
    d * (depth / dist)
}

/// Clamps a disc center so the disc lies inside `[0, side]²`.
pub fn clamp_into_arena(center: Vec2, radius: f64, side: f64) -> Vec2 {
    Vec2::new(
        center.x.clamp(radius, side - radius),
        center.y.clamp(radius, side - radius),
    )
}
