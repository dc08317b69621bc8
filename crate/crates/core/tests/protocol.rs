use mobsim_core::comms::*;
use mobsim_core::controller::*;
use mobsim_core::geom::Vec2;
use mobsim_core::sensing::SideReading;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn call(sender: u32, at: Vec2, tick: u64) -> Message {
    Message {
        kind: MessageKind::Call,
        sender_id: sender,
        emission_position: at,
        emission_tick: tick,
    }
}

fn random_positions(rng: &mut ChaCha8Rng, n: usize) -> Vec<(u32, Vec2)> {
    (1..=n as u32)
        .map(|id| (id, Vec2::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0))))
        .collect()
}

fn delivered(positions: &[(u32, Vec2)], policy: RangePolicy) -> Vec<(u32, u32)> {
    let mut bus = RadioBus::new();
    for &(id, p) in positions {
        bus.broadcast(call(id, p, 0)).unwrap();
    }
    let inboxes = bus.deliver(1, positions, policy);
    let mut pairs = Vec::new();
    for (&(rx, _), inbox) in positions.iter().zip(&inboxes) {
        for m in inbox {
            pairs.push((m.sender_id, rx));
        }
    }
    pairs
}

#[test]
fn wider_range_delivers_superset() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..1000 {
        let n = rng.random_range(2..=10);
        let pos = random_positions(&mut rng, n);
        let wide = delivered(&pos, RangePolicy::Meters(0.5));
        let narrow = delivered(&pos, RangePolicy::Meters(0.1));
        assert!(narrow.iter().all(|p| wide.contains(p)));
        let all = delivered(&pos, RangePolicy::Infinite);
        assert!(wide.iter().all(|p| all.contains(p)));
        // n - 1 copies of every message, none back to the sender
        assert_eq!(all.len(), n * (n - 1));
        assert!(all.iter().all(|(s, r)| s != r));
    }
}

#[test]
fn messages_live_one_tick() {
    let mut bus = RadioBus::new();
    let rx = [(1, Vec2::ZERO), (2, Vec2::new(0.3, 0.0))];
    bus.broadcast(call(1, Vec2::ZERO, 0)).unwrap();
    assert_eq!(bus.deliver(1, &rx, RangePolicy::Infinite)[1].len(), 1);
    assert!(bus.deliver(2, &rx, RangePolicy::Infinite)[1].is_empty());
    // a stale stamp is refused
    assert!(bus.broadcast(call(1, Vec2::ZERO, 1)).is_err());
    bus.broadcast(call(2, Vec2::ZERO, 2)).unwrap();
    let inbox = bus.deliver(3, &rx, RangePolicy::Infinite);
    assert_eq!(inbox[0][0].sender_id, 2);
}

#[test]
fn inbox_keeps_emission_order() {
    let mut bus = RadioBus::new();
    bus.broadcast(call(3, Vec2::ZERO, 0)).unwrap();
    bus.broadcast(Message {
        kind: MessageKind::Ack,
        sender_id: 2,
        emission_position: Vec2::ZERO,
        emission_tick: 0,
    })
    .unwrap();
    let inbox = bus.deliver(1, &[(1, Vec2::ZERO)], RangePolicy::Meters(0.1));
    let senders: Vec<u32> = inbox[0].iter().map(|m| m.sender_id).collect();
    assert_eq!(senders, vec![3, 2]);
}

fn reading() -> impl Strategy<Value = SideReading> {
    (0.0..80.0f64, 0.0..80.0f64).prop_map(|(left, right)| SideReading { left, right })
}

fn prox() -> impl Strategy<Value = SideReading> {
    (0.0..3.0f64, 0.0..3.0f64).prop_map(|(left, right)| SideReading { left, right })
}

fn inbox() -> impl Strategy<Value = Vec<Message>> {
    proptest::collection::vec(
        prop_oneof![Just(MessageKind::Call), Just(MessageKind::Ack)].prop_map(|kind| Message {
            kind,
            sender_id: 7,
            emission_position: Vec2::ZERO,
            emission_tick: 0,
        }),
        0..4,
    )
}

fn state() -> impl Strategy<Value = ControllerState> {
    (any::<bool>(), any::<bool>()).prop_map(|(mob, called)| ControllerState {
        mode: if mob { Mode::Mobbing } else { Mode::Avoiding },
        has_called: called,
        mob_decision_time: mob.then_some(1.0),
    })
}

proptest! {
    #[test]
    fn mobbing_is_absorbing(
        steps in proptest::collection::vec((reading(), prox(), inbox()), 1..40),
    ) {
        let p = ControllerParams::default();
        let mut s = ControllerState::default();
        let mut was_mobbing = false;
        let mut decided_at = None;
        for (i, (l, x, ib)) in steps.iter().enumerate() {
            let d = decide(&s, *l, *x, ib, &p, i as f64);
            if was_mobbing {
                prop_assert_eq!(d.state.mode, Mode::Mobbing);
                prop_assert_eq!(d.state.mob_decision_time, decided_at);
            }
            if d.switched(&s) {
                prop_assert_eq!(d.state.mob_decision_time, Some(i as f64));
                decided_at = d.state.mob_decision_time;
            }
            was_mobbing = d.state.is_mobbing();
            s = d.state;
        }
    }

    #[test]
    fn silence_never_mobs(steps in proptest::collection::vec((reading(), prox()), 1..60)) {
        let p = ControllerParams::default();
        let mut s = ControllerState::default();
        for (i, (l, x)) in steps.iter().enumerate() {
            s = decide(&s, *l, *x, &[], &p, i as f64).state;
            prop_assert_eq!(s.mode, Mode::Avoiding);
        }
    }

    #[test]
    fn mirrored_inputs_mirror_wheels(s in state(), l in reading(), x in prox(), ib in inbox()) {
        let p = ControllerParams::default();
        let d = decide(&s, l, x, &ib, &p, 0.5);
        let m = decide(&s, l.swapped(), x.swapped(), &ib, &p, 0.5);
        prop_assert_eq!(d.wheels.left, m.wheels.right);
        prop_assert_eq!(d.wheels.right, m.wheels.left);
        prop_assert_eq!(d.state, m.state);
        prop_assert_eq!(d.outbox, m.outbox);
    }

    #[test]
    fn wheels_clamped_and_outbox_bounded(s in state(), l in reading(), x in prox(), ib in inbox()) {
        let p = ControllerParams::default();
        let d = decide(&s, l, x, &ib, &p, 0.5);
        prop_assert!(d.wheels.left.abs() <= p.omega_max && d.wheels.right.abs() <= p.omega_max);
        let kinds: Vec<_> = d.outbox.iter().collect();
        prop_assert!(kinds.iter().filter(|k| **k == MessageKind::Call).count() <= 1);
        prop_assert!(kinds.iter().filter(|k| **k == MessageKind::Ack).count() <= 1);
        // pure
        prop_assert_eq!(d, decide(&s, l, x, &ib, &p, 0.5));
    }

    #[test]
    fn turn_direction_follows_mode(near in 12.01..49.0f64, far_frac in 0.0..0.9f64) {
        // light on the left, unsaturated, no obstacles
        let p = ControllerParams::default();
        let l = SideReading { left: near, right: near * far_frac };
        let none = SideReading::default();
        let avoid = decide(&ControllerState::default(), l, none, &[], &p, 0.0);
        prop_assert_eq!(avoid.state.mode, Mode::Avoiding);
        prop_assert!(avoid.wheels.left > avoid.wheels.right);
        let mob = ControllerState { mode: Mode::Mobbing, has_called: true, mob_decision_time: Some(0.0) };
        let d = decide(&mob, l, none, &[], &p, 0.0);
        // the clamp can hide the difference only if both wheels saturate
        prop_assert!(d.wheels.left < d.wheels.right || d.wheels.right == p.omega_max && d.wheels.left == p.omega_max);
    }
}
