//! Batch runner: derives per-episode seeds, fans episodes out to a worker
//! pool (sequentially without the `parallel` feature), persists traces and
//! reduces them into a report.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::metrics::{compute_metrics, csv_report, MetricsError, MetricsReport, ModelLabels};
use crate::agent::{run_episode, EpisodeConfig, EpisodeTrace, TraceError, VlmChannel, VlmChannelConfig};
use crate::gateway::{Backend, BackendConfig};
use crate::world::{generate_scenario, Boundary, ObjectClass, ScenarioConfig, ScenarioError, VehicleState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSettings {
    pub obstacle_count: usize,
    pub boundary: Boundary,
    /// Fixed class, or `None` to cycle through all three by episode index.
    pub object_class: Option<ObjectClass>,
    pub start: VehicleState,
}

impl Default for ScenarioSettings {
    fn default() -> Self {
        let d = ScenarioConfig::default();
        Self { obstacle_count: d.obstacle_count, boundary: d.boundary, object_class: None, start: d.start }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmSlot {
    pub label: String,
    pub params: String,
    pub backend: BackendConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VlmSlot {
    pub label: String,
    pub params: String,
    pub channel: VlmChannelConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub episodes: usize,
    pub base_seed: u64,
    /// Worker threads; 0 picks one per core.
    pub workers: usize,
    pub scenario: ScenarioSettings,
    pub episode: EpisodeConfig,
    pub llm: LlmSlot,
    pub vlm: VlmSlot,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            episodes: 20,
            base_seed: 0,
            workers: 0,
            scenario: ScenarioSettings::default(),
            episode: EpisodeConfig::default(),
            llm: LlmSlot { label: "oracle".into(), params: "-".into(), backend: BackendConfig::OraclePilot },
            vlm: VlmSlot { label: "noiseless".into(), params: "-".into(), channel: VlmChannelConfig::default() },
        }
    }
}

#[derive(Debug, Error)]
pub enum BatchError {
    #[error("invalid run config: {0}")]
    Config(String),
    #[error("episode {index}: {source}")]
    Scenario { index: usize, source: ScenarioError },
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("run directory i/o: {0}")]
    Io(#[from] io::Error),
}

/// How episodes are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon pool; falls back to sequential when built without `parallel`.
    Parallel,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), BatchError> {
        let fail = |m: String| Err(BatchError::Config(m));
        if self.episodes == 0 {
            return fail("episodes must be at least 1".into());
        }
        if !self.scenario.boundary.is_valid() {
            return fail("boundary extents must satisfy min < max".into());
        }
        self.episode.validate().map_err(BatchError::Config)?;
        self.llm.backend.validate().map_err(BatchError::Config)?;
        self.vlm.channel.validate().map_err(BatchError::Config)
    }

    pub fn episode_seed(&self, index: usize) -> u64 {
        self.base_seed.wrapping_add(index as u64)
    }

    pub fn scenario_config(&self, index: usize) -> ScenarioConfig {
        ScenarioConfig {
            obstacle_count: self.scenario.obstacle_count,
            boundary: self.scenario.boundary,
            object_class: self.scenario.object_class.unwrap_or(ObjectClass::ALL[index % ObjectClass::ALL.len()]),
            seed: self.episode_seed(index),
            start: self.scenario.start,
        }
    }

    pub fn labels(&self) -> ModelLabels {
        ModelLabels {
            llm_model: self.llm.label.clone(),
            llm_params: self.llm.params.clone(),
            vlm_model: self.vlm.label.clone(),
            vlm_params: self.vlm.params.clone(),
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// First 16 hex digits of the SHA-256 of the compact config JSON.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(serde_json::to_string(self).expect("config serializes").as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Runs episode `index` of the batch. Depends only on the config and the
/// index, never on which other episodes run.
pub fn run_single(config: &RunConfig, index: usize) -> Result<EpisodeTrace, BatchError> {
    let seed = config.episode_seed(index);
    let scenario = generate_scenario(&config.scenario_config(index)).map_err(|source| BatchError::Scenario { index, source })?;
    let llm = Backend::from_config(&config.llm.backend, seed);
    let vlm = VlmChannel::from_config(&config.vlm.channel, seed);
    let mut trace = run_episode(&scenario, llm, vlm, &config.episode, seed).map_err(|source| BatchError::Scenario { index, source })?;
    trace.header.episode_index = index;
    Ok(trace)
}

fn run_indices(config: &RunConfig, indices: &[usize], execution: Execution) -> Result<Vec<EpisodeTrace>, BatchError> {
    match execution {
        Execution::Sequential => indices.iter().map(|&i| run_single(config, i)).collect(),
        Execution::Parallel => parallel(config, indices),
    }
}

#[cfg(feature = "parallel")]
fn parallel(config: &RunConfig, indices: &[usize]) -> Result<Vec<EpisodeTrace>, BatchError> {
    use rayon::prelude::*;
    let work = || indices.par_iter().map(|&i| run_single(config, i)).collect();
    if config.workers == 0 {
        work()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| BatchError::Config(format!("worker pool: {e}")))?;
        pool.install(work)
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel(config: &RunConfig, indices: &[usize]) -> Result<Vec<EpisodeTrace>, BatchError> {
    run_indices(config, indices, Execution::Sequential)
}

/// Runs every episode in memory, in index order.
pub fn run_episodes(config: &RunConfig, execution: Execution) -> Result<Vec<EpisodeTrace>, BatchError> {
    config.validate()?;
    let indices: Vec<usize> = (0..config.episodes).collect();
    run_indices(config, &indices, execution)
}

#[derive(Debug, Clone)]
pub struct BatchOutput {
    pub report: MetricsReport,
    pub run_dir: PathBuf,
    pub trace_paths: Vec<PathBuf>,
    /// Episodes loaded from an earlier, interrupted run.
    pub resumed: usize,
}

pub fn trace_file_name(index: usize) -> String {
    format!("episode-{index:04}.jsonl")
}

pub fn run_dir_for(config: &RunConfig, out_root: &Path) -> PathBuf {
    out_root.join(format!("run-{}", config.hash()))
}

/// Runs a batch into `out_root/run-<config hash>/`: echoed config, one
/// trace per episode, and `report.csv`. Episodes whose trace file already
/// exists are loaded instead of re-run.
pub fn run_batch(config: &RunConfig, out_root: &Path) -> Result<BatchOutput, BatchError> {
    config.validate()?;
    let run_dir = run_dir_for(config, out_root);
    fs::create_dir_all(&run_dir)?;
    fs::write(run_dir.join("config.json"), config.to_json_pretty() + "\n")?;

    let paths: Vec<PathBuf> = (0..config.episodes).map(|i| run_dir.join(trace_file_name(i))).collect();
    let mut traces: Vec<Option<EpisodeTrace>> = vec![None; config.episodes];
    for (i, p) in paths.iter().enumerate() {
        if p.exists() {
            traces[i] = Some(EpisodeTrace::read(p)?);
        }
    }
    let resumed = traces.iter().filter(|t| t.is_some()).count();
    let pending: Vec<usize> = (0..config.episodes).filter(|&i| traces[i].is_none()).collect();
    for trace in run_indices(config, &pending, Execution::Parallel)? {
        let i = trace.header.episode_index;
        trace.write(&paths[i])?;
        traces[i] = Some(trace);
    }
    let traces: Vec<EpisodeTrace> = traces.into_iter().map(|t| t.expect("every episode ran or resumed")).collect();
    let report = compute_metrics(&traces)?;
    fs::write(run_dir.join("report.csv"), csv_report(&report, &config.labels()))?;
    Ok(BatchOutput { report, run_dir, trace_paths: paths, resumed })
}

/// Reads every `episode-*.jsonl` in a run directory, in file-name order.
pub fn load_run_traces(run_dir: &Path) -> Result<Vec<EpisodeTrace>, BatchError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(run_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("episode-") && n.ends_with(".jsonl"))
        })
        .collect();
    paths.sort();
    paths.iter().map(|p| EpisodeTrace::read(p).map_err(BatchError::from)).collect()
}
