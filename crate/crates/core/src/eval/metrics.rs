use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::astar::astar_shortest_path;
use crate::agent::{EpisodeTrace, Outcome, StepEvent};
use crate::grammar::Action;
use crate::world::{rasterize, OccupancyGrid};

pub const CSV_HEADER: &str =
    "llm_model,llm_params,llm_valid_pct,vlm_model,vlm_params,vlm_valid_pct,success_pct,episodes,mean_steps,mean_optimality";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("no traces to evaluate")]
    EmptyRun,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("path optimality not applicable: {0}")]
pub struct NotApplicable(pub String);

/// Pooled run metrics. Validity percentages are computed over every
/// inference of every episode, not averaged per episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub llm_valid_pct: f64,
    pub vlm_valid_pct: f64,
    pub success_pct: f64,
    /// Episodes in the success denominator.
    pub episodes: usize,
    pub successes: usize,
    /// Aborted before any step completed; left out of `episodes`.
    pub aborted_excluded: usize,
    pub llm_inferences: usize,
    pub llm_valid: usize,
    pub vlm_queries: usize,
    pub vlm_valid: usize,
    pub mean_steps_on_success: Option<f64>,
    pub mean_path_optimality: Option<f64>,
}

fn pct(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Distance actually flown by Move steps divided by the A* length from the
/// start cell to the cell where the goal was first reached. Turns add nothing.
pub fn path_optimality(trace: &EpisodeTrace, grid: &OccupancyGrid) -> Result<f64, NotApplicable> {
    if trace.outcome != Outcome::Success {
        return Err(NotApplicable(format!("outcome is {:?}", trace.outcome)));
    }
    let goal_step = trace
        .records
        .iter()
        .find(|r| r.events.contains(&StepEvent::GoalReached))
        .ok_or_else(|| NotApplicable("no goal-reaching step".into()))?;
    let flown: f64 = trace
        .records
        .iter()
        .take(goal_step.k + 1)
        .filter(|r| matches!(r.parse.as_ref().and_then(|p| p.action()), Some(Action::Move { .. })))
        .map(|r| r.pre_state.position().distance(r.post_state.position()))
        .sum();
    let start = grid
        .cell_of(trace.header.scenario.start.position())
        .ok_or_else(|| NotApplicable("start off grid".into()))?;
    let end = grid
        .cell_of(goal_step.post_state.position())
        .ok_or_else(|| NotApplicable("goal position off grid".into()))?;
    let optimal = astar_shortest_path(grid, start, end).map_err(|e| NotApplicable(e.to_string()))?.length;
    if optimal == 0.0 {
        return Err(NotApplicable("goal reached inside the start cell".into()));
    }
    Ok(flown / optimal)
}

pub fn compute_metrics(traces: &[EpisodeTrace]) -> Result<MetricsReport, MetricsError> {
    if traces.is_empty() {
        return Err(MetricsError::EmptyRun);
    }
    let mut r = MetricsReport {
        llm_valid_pct: 0.0,
        vlm_valid_pct: 0.0,
        success_pct: 0.0,
        episodes: 0,
        successes: 0,
        aborted_excluded: 0,
        llm_inferences: 0,
        llm_valid: 0,
        vlm_queries: 0,
        vlm_valid: 0,
        mean_steps_on_success: None,
        mean_path_optimality: None,
    };
    let mut success_steps = Vec::new();
    let mut optimality = Vec::new();
    for t in traces {
        for rec in &t.records {
            if rec.completed() {
                r.llm_inferences += 1;
                r.llm_valid += usize::from(rec.is_valid_command());
            }
            if let Some(d) = &rec.detection {
                r.vlm_queries += 1;
                r.vlm_valid += usize::from(d.is_valid());
            }
        }
        if t.outcome == Outcome::Aborted && !t.records.iter().any(|rec| rec.completed()) {
            r.aborted_excluded += 1;
            continue;
        }
        r.episodes += 1;
        if t.is_success() {
            r.successes += 1;
            success_steps.push(t.steps_used as f64);
            let grid = rasterize(&t.header.scenario, t.header.config.cell_size);
            if let Some(ratio) = grid.ok().and_then(|g| path_optimality(t, &g).ok()) {
                optimality.push(ratio);
            }
        }
    }
    r.llm_valid_pct = pct(r.llm_valid, r.llm_inferences);
    r.vlm_valid_pct = pct(r.vlm_valid, r.vlm_queries);
    r.success_pct = pct(r.successes, r.episodes);
    r.mean_steps_on_success = mean(&success_steps);
    r.mean_path_optimality = mean(&optimality);
    Ok(r)
}

/// Model names and sizes printed in the report's label columns.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelLabels {
    pub llm_model: String,
    pub llm_params: String,
    pub vlm_model: String,
    pub vlm_params: String,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Header plus one data row.
pub fn csv_report(report: &MetricsReport, labels: &ModelLabels) -> String {
    let opt = |v: Option<f64>, digits: usize| v.map(|x| format!("{x:.digits$}")).unwrap_or_default();
    format!(
        "{CSV_HEADER}\n{},{},{:.1},{},{},{:.1},{:.1},{},{},{}\n",
        csv_field(&labels.llm_model),
        csv_field(&labels.llm_params),
        report.llm_valid_pct,
        csv_field(&labels.vlm_model),
        csv_field(&labels.vlm_params),
        report.vlm_valid_pct,
        report.success_pct,
        report.episodes,
        opt(report.mean_steps_on_success, 2),
        opt(report.mean_path_optimality, 4),
    )
}
