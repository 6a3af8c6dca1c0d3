use aeroagent::dynamics::{apply_action, takeoff, NoiseConfig};
use aeroagent::grammar::Action;
use aeroagent::world::{generate_scenario, Boundary, ObjectClass, Point2, Scenario, ScenarioConfig, Target, VehicleState};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arena() -> Scenario {
    Scenario {
        boundary: Boundary { x_min: -50.0, x_max: 50.0, y_min: -50.0, y_max: 50.0, z_min: 0.0, z_max: 2.2 },
        obstacles: vec![],
        target: Target { position: Point2::new(40.0, 40.0), object_class: ObjectClass::Drone },
        start: VehicleState::new(0.0, 0.0, 0.0, 0.0),
        seed: 0,
    }
}

fn step(state: VehicleState, action: Action) -> VehicleState {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    apply_action(&state, &action, &arena(), &NoiseConfig::disabled(), &mut rng).new_state
}

#[test]
fn spec_examples() {
    let s = step(VehicleState::new(0.0, 0.0, 1.0, 0.0), Action::Move { distance: 2.0 });
    assert_eq!((s.x, s.y, s.yaw), (2.0, 0.0, 0.0));
    let s = step(VehicleState::new(0.0, 0.0, 1.0, 0.0), Action::Turn { theta: 30.0 });
    assert_eq!(s.yaw, -30.0);
    let s = step(VehicleState::new(0.0, 0.0, 1.0, 90.0), Action::Move { distance: -1.5 });
    assert_eq!((s.x, s.y, s.yaw), (0.0, -1.5, 90.0));
}

#[test]
fn takeoff_examples() {
    let s = generate_scenario(&ScenarioConfig::default()).unwrap();
    let t = takeoff(&s);
    assert_eq!((t.x, t.y, t.z, t.yaw), (0.5, 0.5, 1.0, 0.0));
    assert_eq!(takeoff(&s), t);
}

#[test]
fn four_right_turns_restore_heading() {
    for start in [0.0, 45.0, -170.0, 180.0, 12.5] {
        let mut s = VehicleState::new(0.0, 0.0, 1.0, start);
        for _ in 0..4 {
            s = step(s, Action::Turn { theta: 90.0 });
        }
        assert_eq!(s.yaw, VehicleState::new(0.0, 0.0, 1.0, start).yaw);
    }
}

#[test]
fn axis_aligned_displacement_is_exact() {
    for yaw in [0.0, 90.0, 180.0, -90.0] {
        for d in [-3.0, -1.25, 0.1, 2.7, 3.0] {
            let s = step(VehicleState::new(0.0, 0.0, 1.0, yaw), Action::Move { distance: d });
            assert_eq!(s.x.hypot(s.y), f64::abs(d), "yaw {yaw} d {d}");
        }
    }
}

proptest! {
    #[test]
    fn turn_keeps_position_move_keeps_yaw(
        x in -5.0..5.0f64, y in -5.0..5.0f64, yaw in -180.0..180.0f64,
        theta in -90.0..=90.0f64, d in -3.0..=3.0f64,
    ) {
        let s0 = VehicleState::new(x, y, 1.0, yaw);
        let t = step(s0, Action::Turn { theta });
        prop_assert_eq!((t.x, t.y, t.z), (s0.x, s0.y, s0.z));
        prop_assert!(t.yaw > -180.0 && t.yaw <= 180.0);
        let m = step(s0, Action::Move { distance: d });
        prop_assert_eq!((m.yaw, m.z), (s0.yaw, s0.z));
        prop_assert!(((m.x - x).hypot(m.y - y) - d.abs()).abs() <= 1e-12);
    }

    #[test]
    fn move_there_and_back(x in -5.0..5.0f64, y in -5.0..5.0f64, yaw in -180.0..180.0f64, d in -3.0..=3.0f64) {
        let s0 = VehicleState::new(x, y, 1.0, yaw);
        let back = step(step(s0, Action::Move { distance: d }), Action::Move { distance: -d });
        prop_assert!((back.x - x).abs() <= 1e-9 && (back.y - y).abs() <= 1e-9);
    }

    #[test]
    fn noiseless_transition_ignores_rng(seed_a in any::<u64>(), seed_b in any::<u64>(), d in -3.0..=3.0f64) {
        let s0 = VehicleState::new(0.0, 0.0, 1.0, 33.0);
        let noise = NoiseConfig::disabled();
        let a = apply_action(&s0, &Action::Move { distance: d }, &arena(), &noise, &mut ChaCha8Rng::seed_from_u64(seed_a));
        let b = apply_action(&s0, &Action::Move { distance: d }, &arena(), &noise, &mut ChaCha8Rng::seed_from_u64(seed_b));
        prop_assert_eq!(a, b);
    }
}

#[test]
fn noisy_move_scatters_around_command() {
    let noise = NoiseConfig::enabled();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s0 = VehicleState::new(0.0, 0.0, 1.0, 0.0);
    let xs: Vec<f64> = (0..4000)
        .map(|_| apply_action(&s0, &Action::Move { distance: 2.0 }, &arena(), &noise, &mut rng).new_state.x)
        .collect();
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt();
    assert!((mean - 2.0).abs() < 3.0 * 0.05 / (xs.len() as f64).sqrt() + 1e-3, "{mean}");
    assert!((sd - 0.05).abs() < 0.005, "{sd}");
}

#[test]
fn collision_is_judged_on_the_swept_path() {
    let s = Scenario {
        boundary: Boundary::default(),
        obstacles: vec![aeroagent::world::Obstacle::new(Point2::new(2.0, 0.5))],
        target: Target { position: Point2::new(6.0, 4.0), object_class: ObjectClass::Drone },
        start: VehicleState::new(0.5, 0.5, 0.0, 0.0),
        seed: 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let t = apply_action(&takeoff(&s), &Action::Move { distance: 3.0 }, &s, &NoiseConfig::disabled(), &mut rng);
    assert!(t.collided);
    assert_eq!(t.new_state.x, 3.5);
    let t = apply_action(&takeoff(&s), &Action::Move { distance: -1.0 }, &s, &NoiseConfig::disabled(), &mut rng);
    assert!(t.out_of_bounds && !t.collided);
}
