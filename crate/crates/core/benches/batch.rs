use aeroagent::eval::{run_episodes, Execution, LlmSlot, RunConfig, ScenarioSettings};
use aeroagent::gateway::BackendConfig;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn config(llm: BackendConfig) -> RunConfig {
    RunConfig {
        episodes: 64,
        scenario: ScenarioSettings { obstacle_count: 5, ..Default::default() },
        llm: LlmSlot { label: "bench".into(), params: "-".into(), backend: llm },
        ..Default::default()
    }
}

fn batch(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch_64_episodes");
    group.sample_size(20);
    for (name, cfg) in [
        ("oracle", config(BackendConfig::OraclePilot)),
        ("noisy", config(BackendConfig::Noisy { valid_rate: 0.38, seed: 1 })),
    ] {
        for (label, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, name), &cfg, |b, cfg| {
                b.iter(|| run_episodes(cfg, exec).expect("batch runs"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
