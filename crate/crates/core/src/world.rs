//! Arena description and seeded world generation.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geom::{AxisBox, Circle, Pose, Vec2};

pub const ARENA_SIDE: f64 = 1.0;
pub const ROBOT_RADIUS: f64 = 0.037;
pub const BOX_HALF_EXTENT: f64 = 0.05;
pub const DEFAULT_LIGHT_INTENSITY: f64 = 2.0;
/// Footprint used for the light when placing bodies. It has no physics.
pub const LIGHT_PLACEMENT_RADIUS: f64 = 0.02;
pub const WALL_CLEARANCE: f64 = 0.01;
pub const BODY_CLEARANCE: f64 = 0.02;
pub const MAX_REJECTIONS: u32 = 10_000;

pub type RobotId = u32;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WorldError {
    #[error("could not place {body} after {attempts} rejected draws; the arena is too crowded")]
    PlacementExhausted { body: BodyKind, attempts: u32 },
    #[error("group size {k} out of range 1..={available}")]
    GroupOutOfRange { k: usize, available: usize },
    #[error("invalid world: {0}")]
    Invalid(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodyKind {
    Light,
    Box(usize),
    Robot(RobotId),
}

impl core::fmt::Display for BodyKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            BodyKind::Light => write!(f, "the light"),
            BodyKind::Box(i) => write!(f, "box {}", i + 1),
            BodyKind::Robot(id) => write!(f, "robot #{id}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LightSource {
    pub position: Vec2,
    pub intensity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RobotSpawn {
    pub id: RobotId,
    pub pose: Pose,
}

impl RobotSpawn {
    pub fn body(&self) -> Circle {
        Circle::new(self.pose.position, ROBOT_RADIUS)
    }
}

/// Immutable arena: a square of side `arena_side` with its lower-left corner
/// at the origin, bounded by four walls.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldSpec {
    pub arena_side: f64,
    pub light: LightSource,
    pub boxes: Vec<AxisBox>,
    /// Ordered by id.
    pub robots: Vec<RobotSpawn>,
}

// Placement footprint of any body.
#[derive(Debug, Clone, Copy)]
enum Footprint {
    Disc(Circle),
    Square(AxisBox),
}

impl Footprint {
    fn extent(&self) -> f64 {
        match self {
            Footprint::Disc(c) => c.radius,
            Footprint::Square(b) => b.half_extent,
        }
    }

    fn center(&self) -> Vec2 {
        match self {
            Footprint::Disc(c) => c.center,
            Footprint::Square(b) => b.center,
        }
    }
}

/// Euclidean gap between two footprints (0 or negative when touching or
/// overlapping).
fn gap(a: &Footprint, b: &Footprint) -> f64 {
    match (a, b) {
        (Footprint::Disc(p), Footprint::Disc(q)) => p.center.distance(q.center) - p.radius - q.radius,
        (Footprint::Disc(c), Footprint::Square(s)) | (Footprint::Square(s), Footprint::Disc(c)) => {
            if s.contains(c.center) {
                return -c.radius;
            }
            c.center.distance(s.closest_point(c.center)) - c.radius
        }
        (Footprint::Square(s), Footprint::Square(t)) => {
            let dx = libm::fabs(s.center.x - t.center.x) - s.half_extent - t.half_extent;
            let dy = libm::fabs(s.center.y - t.center.y) - s.half_extent - t.half_extent;
            if dx <= 0.0 && dy <= 0.0 {
                dx.max(dy)
            } else {
                libm::hypot(dx.max(0.0), dy.max(0.0))
            }
        }
    }
}

impl WorldSpec {
    pub fn robot_ids(&self) -> impl Iterator<Item = RobotId> + '_ {
        self.robots.iter().map(|r| r.id)
    }

    /// The four wall segments, counter-clockwise from the origin.
    pub fn walls(&self) -> [(Vec2, Vec2); 4] {
        let s = self.arena_side;
        let c = [
            Vec2::new(0.0, 0.0),
            Vec2::new(s, 0.0),
            Vec2::new(s, s),
            Vec2::new(0.0, s),
        ];
        [(c[0], c[1]), (c[1], c[2]), (c[2], c[3]), (c[3], c[0])]
    }

    fn footprints(&self) -> Vec<(BodyKind, Footprint)> {
        let mut out = Vec::with_capacity(1 + self.boxes.len() + self.robots.len());
        out.push((
            BodyKind::Light,
            Footprint::Disc(Circle::new(self.light.position, LIGHT_PLACEMENT_RADIUS)),
        ));
        out.extend(
            self.boxes
                .iter()
                .enumerate()
                .map(|(i, b)| (BodyKind::Box(i), Footprint::Square(*b))),
        );
        out.extend(
            self.robots
                .iter()
                .map(|r| (BodyKind::Robot(r.id), Footprint::Disc(r.body()))),
        );
        out
    }

    /// Smallest pairwise gap between any two placed bodies, or `None` when
    /// there is only one body.
    pub fn min_pairwise_clearance(&self) -> Option<f64> {
        let fp = self.footprints();
        let mut best: Option<f64> = None;
        for i in 0..fp.len() {
            for j in (i + 1)..fp.len() {
                let g = gap(&fp[i].1, &fp[j].1);
                best = Some(best.map_or(g, |b| b.min(g)));
            }
        }
        best
    }

    /// Smallest distance from any body's footprint to a wall.
    pub fn min_wall_clearance(&self) -> f64 {
        self.footprints()
            .iter()
            .map(|(_, f)| {
                let c = f.center();
                let e = f.extent();
                (c.x - e)
                    .min(c.y - e)
                    .min(self.arena_side - c.x - e)
                    .min(self.arena_side - c.y - e)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks the structural invariants a loaded world must satisfy: finite
    /// values, positive sizes, ids ascending from 1, and every body inside
    /// the arena. Spawn clearance is checked only by generation.
    pub fn validate(&self) -> Result<(), WorldError> {
        if !(self.arena_side.is_finite() && self.arena_side > 0.0) {
            return Err(WorldError::Invalid("arena_side must be positive"));
        }
        if !(self.light.intensity.is_finite() && self.light.intensity > 0.0) {
            return Err(WorldError::Invalid("light intensity must be positive"));
        }
        if !self.light.position.is_finite() {
            return Err(WorldError::Invalid("light position must be finite"));
        }
        for b in &self.boxes {
            if !(b.center.is_finite() && b.half_extent.is_finite() && b.half_extent > 0.0) {
                return Err(WorldError::Invalid("box half extent must be positive"));
            }
        }
        for (i, r) in self.robots.iter().enumerate() {
            if r.id as usize != i + 1 {
                return Err(WorldError::Invalid("robot ids must run 1, 2, 3, ... in order"));
            }
            if !(r.pose.position.is_finite() && r.pose.heading.is_finite()) {
                return Err(WorldError::Invalid("robot pose must be finite"));
            }
        }
        if self.min_wall_clearance() < 0.0 {
            return Err(WorldError::Invalid("a body lies outside the arena"));
        }
        Ok(())
    }
}

/// Draws a world from `seed`. The generator is ChaCha8 keyed through
/// `seed_from_u64`; bodies are placed light first, then boxes, then robots
/// by id, each by rejection sampling.
pub fn generate_world(seed: u64, n_robots: usize, n_boxes: usize) -> Result<WorldSpec, WorldError> {
    if n_robots == 0 {
        return Err(WorldError::Invalid("at least one robot is required"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = ARENA_SIDE;
    let mut placed: Vec<Footprint> = Vec::with_capacity(1 + n_boxes + n_robots);

    let mut draw = |rng: &mut ChaCha8Rng, kind: BodyKind, make: &dyn Fn(Vec2) -> Footprint, extent: f64| {
        let lo = extent + WALL_CLEARANCE;
        let hi = side - extent - WALL_CLEARANCE;
        for _ in 0..MAX_REJECTIONS {
            let p = Vec2::new(rng.random_range(lo..hi), rng.random_range(lo..hi));
            let fp = make(p);
            if placed.iter().all(|q| gap(&fp, q) >= BODY_CLEARANCE) {
                placed.push(fp);
                return Ok(p);
            }
        }
        Err(WorldError::PlacementExhausted {
            body: kind,
            attempts: MAX_REJECTIONS,
        })
    };

    let light_pos = draw(
        &mut rng,
        BodyKind::Light,
        &|p| Footprint::Disc(Circle::new(p, LIGHT_PLACEMENT_RADIUS)),
        LIGHT_PLACEMENT_RADIUS,
    )?;

    let mut boxes = Vec::with_capacity(n_boxes);
    for i in 0..n_boxes {
        let c = draw(
            &mut rng,
            BodyKind::Box(i),
            &|p| Footprint::Square(AxisBox::new(p, BOX_HALF_EXTENT)),
            BOX_HALF_EXTENT,
        )?;
        boxes.push(AxisBox::new(c, BOX_HALF_EXTENT));
    }

    let mut robots = Vec::with_capacity(n_robots);
    for i in 0..n_robots {
        let id = (i + 1) as RobotId;
        let p = draw(
            &mut rng,
            BodyKind::Robot(id),
            &|p| Footprint::Disc(Circle::new(p, ROBOT_RADIUS)),
            ROBOT_RADIUS,
        )?;
        // uniform on (-π, π]
        let heading = PI - 2.0 * PI * rng.random::<f64>();
        robots.push(RobotSpawn {
            id,
            pose: Pose::new(p, heading),
        });
    }

    Ok(WorldSpec {
        arena_side: side,
        light: LightSource {
            position: light_pos,
            intensity: DEFAULT_LIGHT_INTENSITY,
        },
        boxes,
        robots,
    })
}

/// Keeps robots #1..#k and drops the rest.
pub fn reduce_to_group(spec: &WorldSpec, k: usize) -> Result<WorldSpec, WorldError> {
    if k == 0 || k > spec.robots.len() {
        return Err(WorldError::GroupOutOfRange {
            k,
            available: spec.robots.len(),
        });
    }
    let mut out = spec.clone();
    out.robots.truncate(k);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = generate_world(42, 10, 3).unwrap();
        let b = generate_world(42, 10, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, generate_world(43, 10, 3).unwrap());
    }

    #[test]
    fn canonical_body_counts() {
        let w = generate_world(7, 10, 3).unwrap();
        assert_eq!(w.robots.len(), 10);
        assert_eq!(w.boxes.len(), 3);
        assert_eq!(w.light.intensity, 2.0);
        assert!(w.robot_ids().eq(1..=10));
    }

    #[test]
    fn reduce_keeps_prefix() {
        let w = generate_world(1, 10, 3).unwrap();
        let g = reduce_to_group(&w, 3).unwrap();
        assert!(g.robot_ids().eq(1..=3));
        assert_eq!(&g.robots[..], &w.robots[..3]);
        assert_eq!(g.boxes, w.boxes);
        assert_eq!(g.light, w.light);
        assert_eq!(reduce_to_group(&w, 10).unwrap(), w);
        assert_eq!(reduce_to_group(&w, 1).unwrap().robots.len(), 1);
    }

    #[test]
    fn reduce_rejects_bad_k() {
        let w = generate_world(1, 10, 3).unwrap();
        assert!(matches!(
            reduce_to_group(&w, 0),
            Err(WorldError::GroupOutOfRange { k: 0, available: 10 })
        ));
        assert!(reduce_to_group(&w, 11).is_err());
    }

    #[test]
    fn overcrowded_arena_exhausts() {
        let err = generate_world(3, 400, 3).unwrap_err();
        assert!(matches!(
            err,
            WorldError::PlacementExhausted {
                body: BodyKind::Robot(_),
                attempts: MAX_REJECTIONS
            }
        ));
    }

    #[test]
    fn zero_robots_rejected() {
        assert!(generate_world(3, 0, 3).is_err());
    }

    #[test]
    fn square_gap_is_euclidean() {
        let a = Footprint::Square(AxisBox::new(Vec2::new(0.0, 0.0), 0.05));
        let b = Footprint::Square(AxisBox::new(Vec2::new(0.13, 0.14), 0.05));
        assert!((gap(&a, &b) - libm::hypot(0.03, 0.04)).abs() < 1e-12);
    }
}
