//! Light and proximity sensor models.
//!
//! A robot carries a ring of sensors on its perimeter. Readings are summed
//! per side; positive bearings are on the left.

use crate::geom::{
    ray_arena_exit, ray_box_intersect, ray_circle_intersect, segment_occluded, Circle, Pose, Ray,
    Vec2,
};
use alloc::vec::Vec;

use crate::world::{LightSource, WorldSpec, ROBOT_RADIUS};

const fn deg(d: f64) -> f64 {
    d * core::f64::consts::PI / 180.0
}

/// Floor on the sensor-to-light distance in the falloff law.
pub const LIGHT_MIN_DISTANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SideReading {
    pub left: f64,
    pub right: f64,
}

impl SideReading {
    pub fn max(&self) -> f64 {
        self.left.max(self.right)
    }

    pub fn swapped(&self) -> SideReading {
        SideReading {
            left: self.right,
            right: self.left,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensorRig {
    /// Left-side light bearings; the right side mirrors them.
    pub light_bearings: [f64; 4],
    /// Left-side proximity bearings; the right side mirrors them.
    pub prox_bearings: [f64; 3],
    pub mount_radius: f64,
    pub prox_range: f64,
}

impl Default for SensorRig {
    fn default() -> Self {
        SensorRig {
            light_bearings: [deg(17.0), deg(47.0), deg(90.0), deg(150.0)],
            prox_bearings: [deg(17.0), deg(47.0), deg(90.0)],
            mount_radius: ROBOT_RADIUS,
            prox_range: 0.05,
        }
    }
}

impl SensorRig {
    /// World position and outward unit normal of the sensor at `bearing`.
    pub fn mount(&self, pose: &Pose, bearing: f64) -> (Vec2, Vec2) {
        let n = Vec2::from_angle(pose.heading + bearing);
        (pose.position + n * self.mount_radius, n)
    }

    /// Lambertian inverse-square reading of one light sensor; zero when a box
    /// blocks the line of sight.
    pub fn light_sensor(&self, world: &WorldSpec, pose: &Pose, bearing: f64) -> f64 {
        let (p, n) = self.mount(pose, bearing);
        let to_light = world.light.position - p;
        let d = to_light.norm();
        let cos_phi = if d > 0.0 { n.dot(to_light) / d } else { 1.0 };
        if cos_phi <= 0.0 {
            return 0.0;
        }
        if d > 0.0 && segment_occluded(p, world.light.position, &world.boxes) {
            return 0.0;
        }
        let dc = d.max(LIGHT_MIN_DISTANCE);
        world.light.intensity * cos_phi / (dc * dc)
    }

    pub fn light_side_sums(&self, world: &WorldSpec, pose: &Pose) -> SideReading {
        let mut s = SideReading::default();
        for &b in &self.light_bearings {
            s.left += self.light_sensor(world, pose, b);
            s.right += self.light_sensor(world, pose, -b);
        }
        s
    }

    /// Distance from the light at which a robot facing it, with nothing in
    /// between, reads exactly `threshold` on its brighter side. Zero if the
    /// reading one body radius from contact is already below it.
    pub fn detection_radius(&self, intensity: f64, threshold: f64) -> f64 {
        let reading = |d: f64| {
            let w = WorldSpec {
                arena_side: 2.0 * d + 1.0,
                light: LightSource {
                    position: Vec2::new(d + 0.5, 0.5),
                    intensity,
                },
                boxes: Vec::new(),
                robots: Vec::new(),
            };
            let pose = Pose::new(Vec2::new(0.5, 0.5), 0.0);
            self.light_side_sums(&w, &pose).max()
        };
        let (mut lo, mut hi) = (2.0 * self.mount_radius, 1.0);
        if reading(lo) < threshold {
            return 0.0;
        }
        while reading(hi) >= threshold && hi < 1e6 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if reading(mid) >= threshold {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Distance to the nearest box, wall or other robot along the sensor's
    /// outward normal, if within range.
    pub fn proximity_hit(
        &self,
        world: &WorldSpec,
        pose: &Pose,
        bearing: f64,
        others: &[Vec2],
    ) -> Option<f64> {
        let (p, n) = self.mount(pose, bearing);
        let ray = Ray::new(p, n);
        let mut best = ray_arena_exit(&ray, world.arena_side);
        for b in &world.boxes {
            if let Some(t) = ray_box_intersect(&ray, b) {
                best = best.min(t);
            }
        }
        for &c in others {
            if let Some(t) = ray_circle_intersect(&ray, &Circle::new(c, ROBOT_RADIUS)) {
                best = best.min(t);
            }
        }
        (best <= self.prox_range).then_some(best)
    }

    pub fn proximity_sensor(
        &self,
        world: &WorldSpec,
        pose: &Pose,
        bearing: f64,
        others: &[Vec2],
    ) -> f64 {
        match self.proximity_hit(world, pose, bearing, others) {
            Some(d) => ((self.prox_range - d) / self.prox_range).clamp(0.0, 1.0),
            None => 0.0,
        }
    }

    /// `others` are the centers of every other robot.
    pub fn proximity_side_sums(&self, world: &WorldSpec, pose: &Pose, others: &[Vec2]) -> SideReading {
        let mut s = SideReading::default();
        for &b in &self.prox_bearings {
            s.left += self.proximity_sensor(world, pose, b, others);
            s.right += self.proximity_sensor(world, pose, -b, others);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::AxisBox;
    use alloc::vec;
    use alloc::vec::Vec;

    fn world_with_light(light: Vec2, boxes: Vec<AxisBox>) -> WorldSpec {
        WorldSpec {
            arena_side: 1.0,
            light: LightSource {
                position: light,
                intensity: 2.0,
            },
            boxes,
            robots: vec![],
        }
    }

    #[test]
    fn head_on_sensor_reading() {
        let rig = SensorRig::default();
        // put the 17° sensor exactly 0.5 m from the light, facing it
        let b = rig.light_bearings[0];
        let pose = Pose::new(Vec2::new(0.2, 0.2), 0.3 - b);
        let (p, n) = rig.mount(&pose, b);
        let w = world_with_light(p + n * 0.5, vec![]);
        let v = rig.light_sensor(&w, &pose, b);
        assert!((v - 8.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn box_blocks_sensor() {
        let rig = SensorRig::default();
        let b = rig.light_bearings[0];
        let pose = Pose::new(Vec2::new(0.2, 0.2), -b);
        let (p, n) = rig.mount(&pose, b);
        let light = p + n * 0.5;
        let mid = p + n * 0.25;
        let w = world_with_light(light, vec![AxisBox::new(mid, 0.05)]);
        assert_eq!(rig.light_sensor(&w, &pose, b), 0.0);
    }

    #[test]
    fn light_behind_sensor_reads_zero() {
        let rig = SensorRig::default();
        let b = rig.light_bearings[0];
        let pose = Pose::new(Vec2::new(0.5, 0.5), 0.0);
        let (p, n) = rig.mount(&pose, b);
        let w = world_with_light(p - n * 0.3, vec![]);
        assert_eq!(rig.light_sensor(&w, &pose, b), 0.0);
    }

    #[test]
    fn wall_ahead_of_forward_sensor() {
        let rig = SensorRig::default();
        let b = rig.prox_bearings[0];
        // the 17° sensor points straight at the +x wall, 0.025 m away
        let pose = Pose::new(Vec2::ZERO, -b);
        let (p, _) = rig.mount(&pose, b);
        let shift = Vec2::new(1.0 - 0.025 - p.x, 0.5);
        let pose = Pose::new(pose.position + shift, -b);
        let w = world_with_light(Vec2::new(0.1, 0.1), vec![]);
        let v = rig.proximity_sensor(&w, &pose, b, &[]);
        assert!((v - 0.5).abs() < 1e-9, "{v}");
    }

    #[test]
    fn open_space_reads_nothing() {
        let rig = SensorRig::default();
        let w = world_with_light(Vec2::new(0.1, 0.1), vec![]);
        let pose = Pose::new(Vec2::new(0.5, 0.5), 1.0);
        assert_eq!(rig.proximity_side_sums(&w, &pose, &[]), SideReading::default());
    }

    #[test]
    fn touching_robot_saturates() {
        let rig = SensorRig::default();
        let w = world_with_light(Vec2::new(0.1, 0.1), vec![]);
        let pose = Pose::new(Vec2::new(0.5, 0.5), 0.0);
        let b = rig.prox_bearings[0];
        let (p, n) = rig.mount(&pose, b);
        let other = p + n * ROBOT_RADIUS;
        assert!((rig.proximity_sensor(&w, &pose, b, &[other]) - 1.0).abs() < 1e-12);
    }
}
