//! Deterministic 2D simulator of Braitenberg robots that avoid a light-source
//! predator until a range-limited "must mob" / "ok" exchange switches them to
//! mobbing it, plus the experiment sweep and repeated-measures statistics
//! used to analyze the outcomes.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the command
//! line and parallel sweeps live in the `mobsim` crate.
#![no_std]
#![allow(clippy::approx_constant)]

extern crate alloc;

pub mod comms;
pub mod controller;
pub mod engine;
pub mod geom;
pub mod harness;
pub mod sensing;
pub mod stats;
pub mod world;

pub use comms::{Message, MessageKind, RadioBus, RangePolicy};
pub use controller::{decide, ControllerParams, ControllerState, Mode, WheelCommand};
pub use engine::{classify, run, Event, EventKind, RunOutput, RunRecord, SimConfig, Simulation, Status};
pub use geom::{AxisBox, Pose, Vec2};
pub use harness::{canonical_conditions, summarize, sweep, Condition, SweepResult};
pub use sensing::{SensorRig, SideReading};
pub use world::{generate_world, reduce_to_group, LightSource, RobotId, RobotSpawn, WorldError, WorldSpec};
