//! Fixed-timestep simulation loop.
//!
//! One tick: deliver last tick's radio traffic, let every robot sense and
//! decide from the same beginning-of-tick snapshot (ascending id), move each
//! robot along its exact unicycle arc, push bodies apart, and log what
//! happened. Event and decision times are stamped at the end of the tick,
//! `(tick + 1) * dt`.

use alloc::vec::Vec;

use crate::comms::{Message, MessageKind, RadioBus, RangePolicy};
use crate::controller::{decide, ControllerParams, ControllerState, Mode, WheelCommand};
use crate::geom::{
    circle_box_depth, circle_circle_depth, clamp_into_arena, resolve_circle_box,
    resolve_circle_circle, wrap_angle, Circle, Pose, Vec2,
};
use crate::sensing::SensorRig;
use crate::world::{RobotId, WorldSpec, ROBOT_RADIUS};

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub duration: f64,
    pub range_policy: RangePolicy,
    pub controller: ControllerParams,
    pub wheel_radius: f64,
    pub axle_length: f64,
    pub rig: SensorRig,
    /// Minimum relaxation sweeps over all contacts per tick.
    pub collision_passes: usize,
    /// Sweeps continue until no contact is deeper than this, meters.
    pub collision_tolerance: f64,
    pub max_collision_passes: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            dt: 0.032,
            duration: 60.0,
            range_policy: RangePolicy::Infinite,
            controller: ControllerParams::default(),
            wheel_radius: 0.0205,
            axle_length: 0.053,
            rig: SensorRig::default(),
            collision_passes: 4,
            collision_tolerance: 1e-8,
            max_collision_passes: 10_000,
        }
    }
}

impl SimConfig {
    /// Whole ticks that fit in `duration`; a trailing partial tick is dropped.
    pub fn total_ticks(&self) -> u64 {
        libm::floor(self.duration / self.dt + 1e-9) as u64
    }

    pub fn tick_time(&self, tick: u64) -> f64 {
        tick as f64 * self.dt
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    MobDecision,
    CallSent,
    AckSent,
}

impl EventKind {
    pub fn payload(self) -> Option<&'static str> {
        match self {
            EventKind::MobDecision => None,
            EventKind::CallSent => Some(MessageKind::Call.payload()),
            EventKind::AckSent => Some(MessageKind::Ack.payload()),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::MobDecision => "mob_decision",
            EventKind::CallSent => "call_sent",
            EventKind::AckSent => "ack_sent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub robot_id: RobotId,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Unanimous,
    Partial,
    Failed,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Unanimous => "unanimous",
            Status::Partial => "partial",
            Status::Failed => "failed",
        }
    }
}

pub fn classify(final_states: &[ControllerState], group_size: usize) -> Status {
    debug_assert!(group_size >= 1);
    let n = final_states.iter().filter(|s| s.is_mobbing()).count();
    if n == 0 {
        Status::Failed
    } else if n == group_size {
        Status::Unanimous
    } else {
        Status::Partial
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub world_id: u32,
    pub range_policy: RangePolicy,
    pub group_size: usize,
    pub status: Status,
    pub n_mobbing: usize,
    pub participation_pct: f64,
    /// One entry per robot, ascending id.
    pub decision_times: Vec<(RobotId, Option<f64>)>,
    pub first_call_time: Option<f64>,
}

/// Worst geometric violations seen after any tick.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhysicsAudit {
    pub max_robot_overlap: f64,
    pub max_box_overlap: f64,
    /// Largest distance any disc pokes outside the arena.
    pub max_wall_excursion: f64,
    pub ticks: u64,
}

impl PhysicsAudit {
    /// Worst case of two audits; tick counts add.
    pub fn merge(&mut self, other: &PhysicsAudit) {
        self.max_robot_overlap = self.max_robot_overlap.max(other.max_robot_overlap);
        self.max_box_overlap = self.max_box_overlap.max(other.max_box_overlap);
        self.max_wall_excursion = self.max_wall_excursion.max(other.max_wall_excursion);
        self.ticks += other.ticks;
    }

    fn observe(&mut self, world: &WorldSpec, poses: &[Pose]) {
        let bodies: Vec<Circle> = poses
            .iter()
            .map(|p| Circle::new(p.position, ROBOT_RADIUS))
            .collect();
        for (i, a) in bodies.iter().enumerate() {
            for b in &bodies[i + 1..] {
                self.max_robot_overlap = self.max_robot_overlap.max(circle_circle_depth(a, b));
            }
            for bx in &world.boxes {
                self.max_box_overlap = self.max_box_overlap.max(circle_box_depth(a, bx));
            }
            let s = world.arena_side;
            let c = a.center;
            let out = (a.radius - c.x)
                .max(a.radius - c.y)
                .max(c.x + a.radius - s)
                .max(c.y + a.radius - s);
            self.max_wall_excursion = self.max_wall_excursion.max(out);
        }
        self.ticks += 1;
    }
}

/// Exact pose update for constant wheel speeds held over `dt`.
pub fn integrate(pose: &Pose, wheels: WheelCommand, wheel_radius: f64, axle_length: f64, dt: f64) -> Pose {
    let v = wheel_radius * (wheels.left + wheels.right) * 0.5;
    let w = wheel_radius * (wheels.right - wheels.left) / axle_length;
    let th = pose.heading;
    let dth = w * dt;
    let position = if libm::fabs(dth) < 1e-12 {
        pose.position + Vec2::from_angle(th) * (v * dt)
    } else {
        let k = v / w;
        pose.position
            + Vec2::new(
                k * (libm::sin(th + dth) - libm::sin(th)),
                -k * (libm::cos(th + dth) - libm::cos(th)),
            )
    };
    Pose {
        position,
        heading: wrap_angle(th + dth),
    }
}

/// Pushes overlapping robots apart and out of boxes and walls, sweeping all
/// contacts in a fixed order. Runs at least `min_passes` sweeps, then keeps
/// going until no sweep meets a contact deeper than `tolerance`, up to
/// `max_passes`. Returns the number of sweeps made.
pub fn resolve_collisions(
    world: &WorldSpec,
    poses: &mut [Pose],
    min_passes: usize,
    max_passes: usize,
    tolerance: f64,
) -> usize {
    let mut pass = 0;
    while pass < max_passes.max(min_passes) {
        let mut worst = 0.0f64;
        for i in 0..poses.len() {
            for j in (i + 1)..poses.len() {
                let a = Circle::new(poses[i].position, ROBOT_RADIUS);
                let b = Circle::new(poses[j].position, ROBOT_RADIUS);
                worst = worst.max(circle_circle_depth(&a, &b));
                let (da, db) = resolve_circle_circle(&a, &b);
                poses[i].position += da;
                poses[j].position += db;
            }
        }
        for pose in poses.iter_mut() {
            for b in &world.boxes {
                let c = Circle::new(pose.position, ROBOT_RADIUS);
                worst = worst.max(circle_box_depth(&c, b));
                pose.position += resolve_circle_box(&c, b);
            }
            let clamped = clamp_into_arena(pose.position, ROBOT_RADIUS, world.arena_side);
            worst = worst.max((clamped - pose.position).norm());
            pose.position = clamped;
        }
        pass += 1;
        if pass >= min_passes && worst <= tolerance {
            break;
        }
    }
    pass
}

#[derive(Debug, Clone)]
pub struct Simulation<'w> {
    world: &'w WorldSpec,
    config: SimConfig,
    tick: u64,
    ids: Vec<RobotId>,
    poses: Vec<Pose>,
    controllers: Vec<ControllerState>,
    bus: RadioBus,
    events: Vec<Event>,
    audit: Option<PhysicsAudit>,
}

impl<'w> Simulation<'w> {
    /// All controllers start avoiding, at their spawn poses.
    pub fn new(world: &'w WorldSpec, config: SimConfig) -> Self {
        Simulation {
            world,
            tick: 0,
            ids: world.robots.iter().map(|r| r.id).collect(),
            poses: world.robots.iter().map(|r| r.pose).collect(),
            controllers: alloc::vec![ControllerState::default(); world.robots.len()],
            bus: RadioBus::new(),
            events: Vec::new(),
            audit: None,
            config,
        }
    }

    /// Records worst-case overlaps after every tick.
    pub fn with_audit(mut self) -> Self {
        self.audit = Some(PhysicsAudit::default());
        self
    }

    pub fn world(&self) -> &WorldSpec {
        self.world
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn ids(&self) -> &[RobotId] {
        &self.ids
    }

    pub fn poses(&self) -> &[Pose] {
        &self.poses
    }

    pub fn controllers(&self) -> &[ControllerState] {
        &self.controllers
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn audit(&self) -> Option<&PhysicsAudit> {
        self.audit.as_ref()
    }

    pub fn is_finished(&self) -> bool {
        self.tick >= self.config.total_ticks()
    }

    pub fn step(&mut self) {
        let tick = self.tick;
        let now = self.config.tick_time(tick + 1);
        let snapshot = self.poses.clone();

        let receivers: Vec<(RobotId, Vec2)> = self
            .ids
            .iter()
            .zip(&snapshot)
            .map(|(&id, p)| (id, p.position))
            .collect();
        let inboxes = self.bus.deliver(tick, &receivers, self.config.range_policy);

        let mut wheels = Vec::with_capacity(self.ids.len());
        let mut others: Vec<Vec2> = Vec::with_capacity(self.ids.len());
        for (i, inbox) in inboxes.iter().enumerate() {
            let pose = &snapshot[i];
            others.clear();
            others.extend(
                snapshot
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, p)| p.position),
            );
            let rig = &self.config.rig;
            let light = rig.light_side_sums(self.world, pose);
            let prox = rig.proximity_side_sums(self.world, pose, &others);
            let before = self.controllers[i];
            let d = decide(&before, light, prox, inbox, &self.config.controller, now);
            let id = self.ids[i];

            for kind in d.outbox.iter() {
                let msg = Message {
                    kind,
                    sender_id: id,
                    emission_position: pose.position,
                    emission_tick: tick,
                };
                self.bus
                    .broadcast(msg)
                    .expect("bus tick tracks the simulation tick");
                let ev = match kind {
                    MessageKind::Call => EventKind::CallSent,
                    MessageKind::Ack => EventKind::AckSent,
                };
                self.events.push(Event {
                    time: now,
                    robot_id: id,
                    kind: ev,
                });
            }
            if d.switched(&before) {
                self.events.push(Event {
                    time: now,
                    robot_id: id,
                    kind: EventKind::MobDecision,
                });
            }
            self.controllers[i] = d.state;
            wheels.push(d.wheels);
        }

        let cfg = &self.config;
        for (pose, w) in self.poses.iter_mut().zip(&wheels) {
            *pose = integrate(pose, *w, cfg.wheel_radius, cfg.axle_length, cfg.dt);
        }
        resolve_collisions(
            self.world,
            &mut self.poses,
            cfg.collision_passes,
            cfg.max_collision_passes,
            cfg.collision_tolerance,
        );

        if let Some(audit) = self.audit.as_mut() {
            audit.observe(self.world, &self.poses);
        }
        self.tick += 1;
    }

    pub fn record(&self) -> RunRecord {
        let group_size = self.ids.len();
        let n_mobbing = self.controllers.iter().filter(|c| c.is_mobbing()).count();
        RunRecord {
            world_id: 0,
            range_policy: self.config.range_policy,
            group_size,
            status: classify(&self.controllers, group_size),
            n_mobbing,
            participation_pct: 100.0 * n_mobbing as f64 / group_size as f64,
            decision_times: self
                .ids
                .iter()
                .zip(&self.controllers)
                .map(|(&id, c)| (id, c.mob_decision_time))
                .collect(),
            first_call_time: self
                .events
                .iter()
                .find(|e| e.kind == EventKind::CallSent)
                .map(|e| e.time),
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        self.controllers.iter().map(|c| c.mode)
    }

    pub fn into_output(self) -> RunOutput {
        RunOutput {
            record: self.record(),
            events: self.events,
            audit: self.audit,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub record: RunRecord,
    pub events: Vec<Event>,
    pub audit: Option<PhysicsAudit>,
}

/// Runs a world for the configured duration.
pub fn run(world: &WorldSpec, config: &SimConfig) -> RunOutput {
    run_observed(world, config, false, |_| {})
}

/// Like [`run`], calling `observe` after every tick (and once before the
/// first) and optionally auditing physics.
pub fn run_observed<F>(world: &WorldSpec, config: &SimConfig, audit: bool, mut observe: F) -> RunOutput
where
    F: FnMut(&Simulation<'_>),
{
    let mut sim = Simulation::new(world, config.clone());
    if audit {
        sim = sim.with_audit();
    }
    observe(&sim);
    while !sim.is_finished() {
        sim.step();
        observe(&sim);
    }
    sim.into_output()
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Avoiding => "avoiding",
            Mode::Mobbing => "mobbing",
        }
    }
}
