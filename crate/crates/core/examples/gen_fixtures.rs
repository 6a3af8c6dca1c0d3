//! Regenerates the metrics fixture traces under `testdata/fixtures/metrics`:
//! 20 episodes, 8 successes, 38 of 100 commands valid, 97 of 100 detections
//! valid.
//!
//!     cargo run -p aeroagent --example gen_fixtures

use std::fs;
use std::path::Path;

use aeroagent::agent::{run_episode, EpisodeConfig, EpisodeTrace, VlmChannel};
use aeroagent::eval::trace_file_name;
use aeroagent::gateway::{Backend, ScriptedBackend, INVALID_REPLIES};
use aeroagent::world::{generate_scenario, ObjectClass, ScenarioConfig};
use aeroagent::{compute_metrics, Outcome};

const EPISODES: usize = 20;
const SUCCESSES: usize = 8;
const STEPS: usize = 100;
const VALID: usize = 38;
const INVALID_DETECTIONS: usize = 3;

fn scenario(seed: u64) -> aeroagent::world::Scenario {
    let class = ObjectClass::ALL[seed as usize % 3];
    generate_scenario(&ScenarioConfig { seed, object_class: class, ..Default::default() }).expect("scenario")
}

/// Valid commands the oracle pilot needs for this seed.
fn oracle_commands(seed: u64, config: &EpisodeConfig) -> Option<Vec<String>> {
    let s = scenario(seed);
    let t = run_episode(&s, Backend::OraclePilot, VlmChannel::noiseless(), config, seed).ok()?;
    (t.outcome == Outcome::Success).then(|| t.records.iter().filter_map(|r| r.llm_raw.clone()).collect())
}

fn main() {
    let config = EpisodeConfig::default();
    let mut plans: Vec<(u64, Vec<String>)> = Vec::new();
    let mut seed = 0;
    while plans.len() < SUCCESSES {
        if let Some(cmds) = oracle_commands(seed, &config) {
            plans.push((seed, cmds));
        }
        seed += 1;
    }
    let success_valid: usize = plans.iter().map(|(_, c)| c.len()).sum();
    // failures: Move(-1.0); backs out of the arena in one command, and
    // Turn(90); Move(1.0); does it in two
    let failures = EPISODES - SUCCESSES;
    let two_step = VALID - success_valid - failures;
    assert!(two_step <= failures, "oracle used {success_valid} commands, too many for the target");
    for i in 0..failures {
        let cmds = if i < two_step { vec!["Turn(90);", "Move(1.0);"] } else { vec!["Move(-1.0);"] };
        plans.push((seed + i as u64, cmds.into_iter().map(String::from).collect()));
    }

    let padding_total = STEPS - VALID;
    let mut invalid_cursor = 0;
    let mut traces: Vec<EpisodeTrace> = Vec::new();
    for (index, (seed, cmds)) in plans.iter().enumerate() {
        let pad = padding_total / EPISODES + usize::from(index < padding_total % EPISODES);
        let mut replies: Vec<String> = Vec::new();
        for _ in 0..pad {
            replies.push(INVALID_REPLIES[invalid_cursor % INVALID_REPLIES.len()].to_string());
            invalid_cursor += 1;
        }
        replies.extend(cmds.iter().cloned());
        let s = scenario(*seed);
        // first pass records honest detections, second pass corrupts a few
        let honest = run_episode(
            &s,
            Backend::Scripted(ScriptedBackend::new(replies.clone())),
            VlmChannel::noiseless(),
            &config,
            *seed,
        )
        .expect("episode");
        let mut vlm: Vec<String> = honest.records.iter().filter_map(|r| r.vlm_raw.clone()).collect();
        if index < INVALID_DETECTIONS {
            vlm[0] = "The image shows several cardboard boxes.".into();
        }
        let mut t = run_episode(
            &s,
            Backend::Scripted(ScriptedBackend::new(replies)),
            VlmChannel::Scripted(ScriptedBackend::new(vlm)),
            &config,
            *seed,
        )
        .expect("episode");
        t.header.episode_index = index;
        traces.push(t);
    }

    let m = compute_metrics(&traces).expect("metrics");
    assert_eq!((m.successes, m.episodes), (SUCCESSES, EPISODES));
    assert_eq!((m.llm_valid, m.llm_inferences), (VALID, STEPS));
    assert_eq!((m.vlm_valid, m.vlm_queries), (STEPS - INVALID_DETECTIONS, STEPS));

    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata/fixtures/metrics");
    fs::create_dir_all(&dir).expect("fixture dir");
    for t in &traces {
        t.write(&dir.join(trace_file_name(t.header.episode_index))).expect("write trace");
    }
    println!(
        "wrote {} traces: success {:.1}%, llm valid {:.1}%, vlm valid {:.1}%",
        traces.len(),
        m.success_pct,
        m.llm_valid_pct,
        m.vlm_valid_pct
    );
}
