//! Range-limited broadcast radio.
//!
//! Messages emitted during tick `t` are delivered at the start of tick
//! `t + 1` and then discarded. Range is checked between the sender's
//! position at emission and the receiver's position at delivery.

use alloc::vec::Vec;

use crate::geom::Vec2;
use crate::world::RobotId;

pub const CALL_PAYLOAD: &str = "must mob";
pub const ACK_PAYLOAD: &str = "ok";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MessageKind {
    Call,
    Ack,
}

impl MessageKind {
    pub fn payload(self) -> &'static str {
        match self {
            MessageKind::Call => CALL_PAYLOAD,
            MessageKind::Ack => ACK_PAYLOAD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Message {
    pub kind: MessageKind,
    pub sender_id: RobotId,
    pub emission_position: Vec2,
    pub emission_tick: u64,
}

impl Message {
    pub fn payload(&self) -> &'static str {
        self.kind.payload()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RangePolicy {
    Infinite,
    Meters(f64),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CommsError {
    #[error("message stamped for tick {message} broadcast during tick {bus}")]
    TickMismatch { message: u64, bus: u64 },
    #[error("invalid range {0:?}: expected -1 or a positive number of meters")]
    BadRange(alloc::string::String),
}

impl RangePolicy {
    /// Interprets a numeric range; `-1` means unlimited.
    pub fn from_meters(r: f64) -> Result<Self, CommsError> {
        if r == -1.0 {
            Ok(RangePolicy::Infinite)
        } else if r.is_finite() && r > 0.0 {
            Ok(RangePolicy::Meters(r))
        } else {
            Err(CommsError::BadRange(alloc::format!("{r}")))
        }
    }

    /// Accepts `inf`, `-1`, or a positive decimal number of meters.
    pub fn parse(s: &str) -> Result<Self, CommsError> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinite") {
            return Ok(RangePolicy::Infinite);
        }
        match t.parse::<f64>() {
            Ok(r) => RangePolicy::from_meters(r),
            Err(_) => Err(CommsError::BadRange(t.into())),
        }
    }

    pub fn reaches(&self, from: Vec2, to: Vec2) -> bool {
        match *self {
            RangePolicy::Infinite => true,
            RangePolicy::Meters(r) => from.distance(to) <= r,
        }
    }
}

impl core::fmt::Display for RangePolicy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RangePolicy::Infinite => f.write_str("inf"),
            RangePolicy::Meters(r) => write!(f, "{r}"),
        }
    }
}

/// Per-receiver message lists, in the same order as the receivers passed to
/// [`RadioBus::deliver`].
pub type Inboxes = Vec<Vec<Message>>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RadioBus {
    tick: u64,
    pending: Vec<Message>,
}

impl RadioBus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn pending(&self) -> &[Message] {
        &self.pending
    }

    pub fn broadcast(&mut self, msg: Message) -> Result<(), CommsError> {
        if msg.emission_tick != self.tick {
            return Err(CommsError::TickMismatch {
                message: msg.emission_tick,
                bus: self.tick,
            });
        }
        self.pending.push(msg);
        Ok(())
    }

    /// Starts tick `now`: hands every pending message to each receiver in
    /// range other than its sender, clears the queue, and accepts broadcasts
    /// stamped `now` from here on.
    pub fn deliver(&mut self, now: u64, receivers: &[(RobotId, Vec2)], policy: RangePolicy) -> Inboxes {
        debug_assert!(self.pending.iter().all(|m| m.emission_tick < now));
        let inboxes = receivers
            .iter()
            .map(|&(id, pos)| {
                self.pending
                    .iter()
                    .filter(|m| m.sender_id != id && policy.reaches(m.emission_position, pos))
                    .copied()
                    .collect()
            })
            .collect();
        self.pending.clear();
        self.tick = now;
        inboxes
    }
}
