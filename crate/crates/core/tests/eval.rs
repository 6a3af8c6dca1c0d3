mod common;

use std::fs;
use std::path::Path;

use aeroagent::agent::{run_episode, EpisodeConfig, EpisodeTrace, VlmChannel, VlmChannelConfig};
use aeroagent::eval::{
    astar_shortest_path, csv_report, load_run_traces, octile_distance, octile_length, path_optimality, run_batch,
    run_episodes, run_single, Execution, LlmSlot, MetricsError, RunConfig, CSV_HEADER,
};
use aeroagent::gateway::{Backend, BackendConfig, ScriptedBackend};
use aeroagent::perception::DetectorNoise;
use aeroagent::world::{rasterize, Cell, ObjectClass, OccupancyGrid, Point2, Scenario, Target, VehicleState};
use aeroagent::{compute_metrics, Outcome};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn empty_grid() -> OccupancyGrid {
    OccupancyGrid::new_free(Point2::new(0.0, 0.0), 0.25, 28, 18)
}

#[test]
#[allow(clippy::approx_constant)]
fn astar_examples() {
    let g = empty_grid();
    assert_eq!(astar_shortest_path(&g, Cell::new(0, 0), Cell::new(8, 0)).unwrap().length, 2.0);
    let d = astar_shortest_path(&g, Cell::new(0, 0), Cell::new(4, 4)).unwrap().length;
    assert!((d - 1.4142).abs() < 1e-4);
}

#[test]
fn astar_matches_uniform_cost_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut compared = 0;
    for seed in 0..20 {
        let g = common::random_grid(seed, 0.25);
        for _ in 0..10 {
            let (a, b) = (common::random_free_cell(&g, &mut rng), common::random_free_cell(&g, &mut rng));
            match (astar_shortest_path(&g, a, b), common::ucs_steps(&g, a, b)) {
                (Ok(p), Some((o, d))) => {
                    assert_eq!(p.step_counts(), (o, d), "grid {seed} {a:?}->{b:?}");
                    assert_eq!(p.length.to_bits(), octile_length(o, d, 0.25).to_bits());
                    compared += 1;
                }
                (Err(_), None) => {}
                (x, y) => panic!("grid {seed} {a:?}->{b:?}: astar {x:?} ucs {y:?}"),
            }
        }
    }
    assert!(compared > 100);
}

#[test]
fn astar_paths_are_well_formed() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for seed in 0..20 {
        let g = common::random_grid(100 + seed, 0.2);
        let (a, b) = (common::random_free_cell(&g, &mut rng), common::random_free_cell(&g, &mut rng));
        if let Ok(p) = astar_shortest_path(&g, a, b) {
            assert_eq!((p.cells[0], *p.cells.last().unwrap()), (a, b));
            for w in p.cells.windows(2) {
                assert!(w[0].col.abs_diff(w[1].col) <= 1 && w[0].row.abs_diff(w[1].row) <= 1 && w[0] != w[1]);
            }
            assert!(p.cells.iter().all(|&c| g.is_free(c)));
        }
    }
}

#[test]
fn octile_heuristic_is_admissible() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..20 {
        let g = common::random_grid(seed, 0.25);
        let goal = common::random_free_cell(&g, &mut rng);
        for (i, best) in common::ucs_all(&g, goal).into_iter().enumerate() {
            if let Some((o, d)) = best {
                let c = Cell::new(i % g.width, i / g.width);
                assert!(octile_distance(c, goal, 0.25) <= octile_length(o, d, 0.25) + 1e-12);
            }
        }
    }
}

#[test]
fn astar_cost_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for seed in 0..20 {
        let g = common::random_grid(seed, 0.25);
        let (a, b) = (common::random_free_cell(&g, &mut rng), common::random_free_cell(&g, &mut rng));
        let there = astar_shortest_path(&g, a, b).map(|p| p.length).ok();
        let back = astar_shortest_path(&g, b, a).map(|p| p.length).ok();
        assert_eq!(there, back);
    }
}

fn straight_scenario() -> Scenario {
    Scenario {
        boundary: Default::default(),
        obstacles: vec![],
        target: Target { position: Point2::new(5.5, 0.5), object_class: ObjectClass::Drone },
        start: VehicleState::new(0.5, 0.5, 0.0, 0.0),
        seed: 0,
    }
}

fn scripted_episode(s: &Scenario, replies: &[&str]) -> EpisodeTrace {
    let llm = Backend::Scripted(ScriptedBackend::new(replies.iter().copied()));
    run_episode(s, llm, VlmChannel::noiseless(), &EpisodeConfig::default(), 0).unwrap()
}

#[test]
fn path_optimality_examples() {
    let s = straight_scenario();
    let g = rasterize(&s, 0.25).unwrap();
    let oracle = run_episode(&s, Backend::OraclePilot, VlmChannel::noiseless(), &EpisodeConfig::default(), 0).unwrap();
    let ratio = path_optimality(&oracle, &g).unwrap();
    let eps = 2.0 * 0.25 / 5.0;
    assert!((1.0 - eps..=1.2).contains(&ratio), "{ratio}");

    let plain = scripted_episode(&s, &["Move(3.0);", "Move(2.0);"]);
    let spin = ["Turn(90);", "Turn(90);", "Turn(90);", "Turn(90);"];
    let spun = scripted_episode(&s, &[&spin[..], &["Move(3.0);"], &spin[..], &["Move(2.0);"]].concat());
    assert_eq!(spun.outcome, Outcome::Success);
    assert_eq!(path_optimality(&plain, &g).unwrap(), path_optimality(&spun, &g).unwrap());

    let failed = scripted_episode(&s, &["Move(-1.0);"]);
    assert_eq!(failed.outcome, Outcome::OutOfBounds);
    assert!(path_optimality(&failed, &g).is_err());
}

/// Timeout episodes of `k` steps each, built from a validity pattern.
fn pattern_traces(episodes: usize, k: usize, valid: &[bool], vlm_invalid: &[bool]) -> Vec<EpisodeTrace> {
    let config = EpisodeConfig { k_max: k, ..Default::default() };
    let s = straight_scenario();
    (0..episodes)
        .map(|e| {
            let llm: Vec<&str> = (0..k).map(|i| if valid[e * k + i] { "Turn(0);" } else { "Sorry, I can't." }).collect();
            let vlm: Vec<&str> = (0..k).map(|i| if vlm_invalid[e * k + i] { "Maybe?" } else { "No" }).collect();
            run_episode(
                &s,
                Backend::Scripted(ScriptedBackend::new(llm)),
                VlmChannel::Scripted(ScriptedBackend::new(vlm)),
                &config,
                0,
            )
            .unwrap()
        })
        .collect()
}

#[test]
fn pooled_validity_examples() {
    let valid: Vec<bool> = (0..50).map(|i| i < 19).collect();
    let m = compute_metrics(&pattern_traces(5, 10, &valid, &[false; 50])).unwrap();
    assert_eq!(m.llm_valid_pct, 38.0);
    assert_eq!(m.success_pct, 0.0);

    let vlm_bad: Vec<bool> = (0..100).map(|i| i % 33 == 1).collect();
    let m = compute_metrics(&pattern_traces(10, 10, &[true; 100], &vlm_bad)).unwrap();
    assert_eq!(m.vlm_valid_pct, 97.0);
    assert_eq!(m.llm_valid_pct, 100.0);
}

#[test]
fn success_rate_example_and_monotonicity() {
    let s = straight_scenario();
    let win = scripted_episode(&s, &["Move(3.0);", "Move(2.0);"]);
    let loss = scripted_episode(&s, &["Move(-1.0);"]);
    let mut traces: Vec<EpisodeTrace> = (0..20).map(|i| if i < 8 { win.clone() } else { loss.clone() }).collect();
    let m = compute_metrics(&traces).unwrap();
    assert_eq!(m.success_pct, 40.0);
    assert_eq!(m.mean_steps_on_success, Some(2.0));
    traces.push(win);
    assert!(compute_metrics(&traces).unwrap().success_pct >= m.success_pct);
    assert_eq!(compute_metrics(&[]), Err(MetricsError::EmptyRun));
}

#[test]
fn aborted_without_steps_leaves_denominator() {
    use aeroagent::gateway::GatewayError;
    let s = straight_scenario();
    let dead = run_episode(
        &s,
        Backend::Scripted(ScriptedBackend::with_outcomes(vec![Err(GatewayError::ConnectionRefused); 3])),
        VlmChannel::noiseless(),
        &EpisodeConfig::default(),
        0,
    )
    .unwrap();
    assert_eq!(dead.outcome, Outcome::Aborted);
    let win = scripted_episode(&s, &["Move(3.0);", "Move(2.0);"]);
    let m = compute_metrics(&[dead, win]).unwrap();
    assert_eq!((m.episodes, m.aborted_excluded, m.success_pct), (1, 1, 100.0));
}

#[test]
fn csv_has_fixed_header() {
    let s = straight_scenario();
    let m = compute_metrics(&[scripted_episode(&s, &["Move(3.0);", "Move(2.0);"])]).unwrap();
    let csv = csv_report(&m, &RunConfig::default().labels());
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert_eq!(lines.next(), Some("oracle,-,100.0,noiseless,-,100.0,100.0,1,2.00,1.0000"));
}

fn mock_config(episodes: usize) -> RunConfig {
    RunConfig {
        episodes,
        base_seed: 7,
        llm: LlmSlot { label: "noisy".into(), params: "-".into(), backend: BackendConfig::Noisy { valid_rate: 0.7, seed: 3 } },
        episode: EpisodeConfig { dynamics_noise: aeroagent::dynamics::NoiseConfig::enabled(), ..Default::default() },
        vlm: aeroagent::eval::VlmSlot {
            label: "sim".into(),
            params: "-".into(),
            channel: VlmChannelConfig::Simulated { noise: DetectorNoise::new(0.05, 0.05, 0.03).unwrap() },
        },
        ..Default::default()
    }
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn batch_is_byte_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let config = mock_config(12);
    let ra = run_batch(&config, a.path()).unwrap();
    let rb = run_batch(&config, b.path()).unwrap();
    assert_eq!(ra.run_dir.file_name(), rb.run_dir.file_name());
    assert_eq!(dir_bytes(&ra.run_dir), dir_bytes(&rb.run_dir));
    assert_eq!(dir_bytes(&ra.run_dir).len(), 12 + 2);
}

#[test]
fn sequential_and_parallel_agree() {
    let config = mock_config(16);
    let seq = run_episodes(&config, Execution::Sequential).unwrap();
    let par = run_episodes(&config, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn interrupted_batch_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let config = mock_config(10);
    let first = run_batch(&config, dir.path()).unwrap();
    let before = dir_bytes(&first.run_dir);
    for i in [2, 5, 9] {
        fs::remove_file(&first.trace_paths[i]).unwrap();
    }
    fs::remove_file(first.run_dir.join("report.csv")).unwrap();
    let second = run_batch(&config, dir.path()).unwrap();
    assert_eq!(second.resumed, 7);
    assert_eq!(dir_bytes(&second.run_dir), before);
    assert_eq!(second.report, first.report);
}

#[test]
fn episodes_are_seed_isolated() {
    let small = mock_config(4);
    let large = mock_config(12);
    for i in 0..4 {
        assert_eq!(run_single(&small, i).unwrap().to_jsonl(), run_single(&large, i).unwrap().to_jsonl());
    }
}

#[test]
fn persisted_traces_reproduce_report() {
    let dir = tempfile::tempdir().unwrap();
    let config = mock_config(10);
    let out = run_batch(&config, dir.path()).unwrap();
    let loaded = load_run_traces(&out.run_dir).unwrap();
    assert_eq!(loaded.len(), 10);
    let again = compute_metrics(&loaded).unwrap();
    assert_eq!(again, out.report);
    let csv = fs::read_to_string(out.run_dir.join("report.csv")).unwrap();
    assert_eq!(csv, csv_report(&again, &config.labels()));
    let echoed: RunConfig = serde_json::from_str(&fs::read_to_string(out.run_dir.join("config.json")).unwrap()).unwrap();
    assert_eq!(echoed, config);
}

#[test]
fn oracle_batch_on_open_arena_always_succeeds() {
    let mut config = RunConfig::default();
    config.scenario.obstacle_count = 0;
    let traces = run_episodes(&config, Execution::Parallel).unwrap();
    let m = compute_metrics(&traces).unwrap();
    assert_eq!(m.success_pct, 100.0);
    assert_eq!(m.episodes, 20);
}

#[test]
fn zero_validity_batch_never_succeeds() {
    let mut config = RunConfig::default();
    config.llm.backend = BackendConfig::Noisy { valid_rate: 0.0, seed: 1 };
    let m = compute_metrics(&run_episodes(&config, Execution::Parallel).unwrap()).unwrap();
    assert_eq!((m.success_pct, m.llm_valid_pct), (0.0, 0.0));
}

#[test]
fn invalid_config_rejected() {
    let config = RunConfig { episodes: 0, ..Default::default() };
    assert!(run_episodes(&config, Execution::Sequential).is_err());
}
