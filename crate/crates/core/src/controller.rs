//! Braitenberg controller with the call/acknowledge mobbing protocol.
//!
//! Each tick a robot first runs the protocol on its inbox, then maps its
//! side sums onto wheel speeds. Obstacle avoidance is always active; the
//! predator term either repels (while avoiding) or attracts (once mobbing).
//! Mobbing is absorbing.

use crate::comms::{Message, MessageKind};
use crate::sensing::SideReading;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Avoiding,
    Mobbing,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerState {
    pub mode: Mode,
    pub has_called: bool,
    pub mob_decision_time: Option<f64>,
}

impl ControllerState {
    pub fn is_mobbing(&self) -> bool {
        self.mode == Mode::Mobbing
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerParams {
    /// Cruise wheel speed, rad/s.
    pub omega_base: f64,
    /// Wheel speed limit, rad/s.
    pub omega_max: f64,
    /// Obstacle gain, rad/s per unit of proximity sum.
    pub k_obstacle: f64,
    /// Repulsion gain while avoiding, rad/s per unit of normalized light.
    pub k_fear: f64,
    /// Attraction gain while mobbing, rad/s per unit of normalized light.
    pub k_mob: f64,
    /// Light threshold above which an avoiding robot calls.
    pub light_threshold: f64,
    /// Side sum that maps to full light drive.
    pub light_saturation: f64,
    /// Emit at most one call per robot per run instead of one per qualifying
    /// tick.
    pub call_once: bool,
}

impl Default for ControllerParams {
    fn default() -> Self {
        ControllerParams {
            omega_base: 4.0,
            omega_max: 6.28,
            k_obstacle: 1.5,
            k_fear: 5.0,
            k_mob: 6.0,
            light_threshold: 12.0,
            light_saturation: 50.0,
            call_once: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamsError {
    #[error("antipredator gains must exceed the obstacle gain")]
    WeakPredatorGain,
    #[error("wheel speeds need 0 < omega_base <= omega_max")]
    BadSpeeds,
    #[error("light threshold and saturation must be positive")]
    BadLight,
}

impl ControllerParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        if !(self.k_fear > self.k_obstacle && self.k_mob > self.k_obstacle) {
            return Err(ParamsError::WeakPredatorGain);
        }
        if !(self.omega_base > 0.0 && self.omega_base <= self.omega_max) {
            return Err(ParamsError::BadSpeeds);
        }
        if !(self.light_threshold > 0.0 && self.light_saturation > 0.0) {
            return Err(ParamsError::BadLight);
        }
        Ok(())
    }
}

/// Wheel angular velocities, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WheelCommand {
    pub left: f64,
    pub right: f64,
}

/// Messages a robot emits in one tick. Holds at most one of each kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Outbox {
    pub ack: bool,
    pub call: bool,
}

impl Outbox {
    pub fn is_empty(&self) -> bool {
        !self.ack && !self.call
    }

    /// Acks before calls, matching the protocol order.
    pub fn iter(&self) -> impl Iterator<Item = MessageKind> {
        let ack = self.ack.then_some(MessageKind::Ack);
        let call = self.call.then_some(MessageKind::Call);
        ack.into_iter().chain(call)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub state: ControllerState,
    pub wheels: WheelCommand,
    pub outbox: Outbox,
}

impl Decision {
    /// True when this decision moved the robot from avoiding to mobbing.
    pub fn switched(&self, before: &ControllerState) -> bool {
        before.mode == Mode::Avoiding && self.state.mode == Mode::Mobbing
    }
}

pub fn decide(
    state: &ControllerState,
    light: SideReading,
    prox: SideReading,
    inbox: &[Message],
    params: &ControllerParams,
    now: f64,
) -> Decision {
    let mut next = *state;
    let mut outbox = Outbox::default();

    let got_call = inbox.iter().any(|m| m.kind == MessageKind::Call);
    let got_ack = inbox.iter().any(|m| m.kind == MessageKind::Ack);

    if got_call {
        outbox.ack = true;
        if next.mode == Mode::Avoiding {
            next.mode = Mode::Mobbing;
            next.mob_decision_time = Some(now);
        }
    } else if next.mode == Mode::Avoiding && next.has_called && got_ack {
        next.mode = Mode::Mobbing;
        next.mob_decision_time = Some(now);
    }
    if next.mode == Mode::Avoiding
        && light.max() > params.light_threshold
        && !(params.call_once && next.has_called)
    {
        outbox.call = true;
        next.has_called = true;
    }

    let wheels = motor(next.mode, light, prox, params);
    Decision {
        state: next,
        wheels,
        outbox,
    }
}

/// Crossed sensor-to-wheel wiring: a stimulus on one side acts on the
/// opposite wheel.
pub fn motor(mode: Mode, light: SideReading, prox: SideReading, p: &ControllerParams) -> WheelCommand {
    let lam_l = (light.left / p.light_saturation).min(1.0);
    let lam_r = (light.right / p.light_saturation).min(1.0);
    let mut left = p.omega_base - p.k_obstacle * prox.right;
    let mut right = p.omega_base - p.k_obstacle * prox.left;
    match mode {
        Mode::Avoiding => {
            right -= p.k_fear * lam_l;
            left -= p.k_fear * lam_r;
        }
        Mode::Mobbing => {
            right += p.k_mob * lam_l;
            left += p.k_mob * lam_r;
        }
    }
    WheelCommand {
        left: left.clamp(-p.omega_max, p.omega_max),
        right: right.clamp(-p.omega_max, p.omega_max),
    }
}
