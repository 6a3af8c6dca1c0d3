//! `aeroagent` command-line front end.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 backend
//! failure, 4 mismatch (replay divergence or corpus disagreement).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aeroagent::agent::{replay_trace, EpisodeTrace, VlmChannelConfig};
use aeroagent::eval::{csv_report, load_run_traces, run_batch, BatchError, LlmSlot, RunConfig, VlmSlot};
use aeroagent::gateway::{BackendConfig, CompletionRequest, RemoteClient, RemoteConfig, DEFAULT_TIMEOUT_MS};
use aeroagent::grammar::{check_corpus, load_corpus};
use aeroagent::perception::DetectorNoise;
use aeroagent::world::{generate_scenario, rasterize, ObjectClass, ScenarioConfig};
use aeroagent::compute_metrics;
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

const DEFAULT_BASE_URL: &str = "http://127.0.0.1:11434";
const BUNDLED_CORPUS: &str = include_str!("../../core/testdata/grammar_corpus.jsonl");

#[derive(Parser)]
#[command(name = "aeroagent", version, about = "Simulate and score language-model drone pilots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of episodes and write traces plus report.csv.
    Run(RunArgs),
    /// Re-simulate trace files (or run directories) from their recorded replies.
    Replay {
        #[arg(required = true)]
        traces: Vec<PathBuf>,
    },
    /// Recompute the report of a run directory from its traces.
    Report {
        run_dir: PathBuf,
        /// Also write the CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check parse_command against a JSON Lines corpus (bundled one by default).
    ValidateCorpus { corpus: Option<PathBuf> },
    /// Send one fixed request to a model server and print the verbatim reply.
    Probe {
        #[arg(long, env = "AEROAGENT_BASE_URL", default_value = DEFAULT_BASE_URL)]
        base_url: String,
        #[arg(long, default_value = "llama3.2")]
        model: String,
        #[arg(long, default_value_t = DEFAULT_TIMEOUT_MS)]
        timeout_ms: u64,
    },
    /// Print a generated scenario as JSON, optionally exporting its grid.
    Scenario {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        obstacles: usize,
        #[arg(long, default_value_t = 0.25)]
        cell_size: f64,
        /// Write the occupancy grid as a plain PGM file.
        #[arg(long)]
        pgm: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON run config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// oracle | noisy:RATE | remote:MODEL | scripted:FILE
    #[arg(long)]
    llm: Option<String>,
    /// noiseless | noisy:FP,FN,INVALID | remote:MODEL | scripted:FILE
    #[arg(long)]
    vlm: Option<String>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    obstacles: Option<usize>,
    /// Base seed; episode i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    history: Option<usize>,
    #[arg(long)]
    temperature: Option<f64>,
    /// humanoid_robot | drone | quadcopter (default cycles through all three)
    #[arg(long)]
    object_class: Option<String>,
    /// Enable actuation noise (yaw 2 deg, distance 0.05 m).
    #[arg(long)]
    dynamics_noise: bool,
    /// List obstacle positions in the prompt.
    #[arg(long)]
    reveal_obstacles: bool,
    #[arg(long, env = "AEROAGENT_BASE_URL", default_value = DEFAULT_BASE_URL)]
    base_url: String,
    #[arg(long)]
    timeout_ms: Option<u64>,
    #[arg(long)]
    retries: Option<u32>,
    /// Report label for the LLM column (defaults from --llm).
    #[arg(long)]
    llm_label: Option<String>,
    #[arg(long)]
    llm_params: Option<String>,
    #[arg(long)]
    vlm_label: Option<String>,
    #[arg(long)]
    vlm_params: Option<String>,
    /// Any config field by dotted path, e.g. --set episode.cell_size=0.1
    #[arg(long = "set", value_name = "PATH=JSON")]
    sets: Vec<String>,
    /// Root directory for run-<hash>/ folders.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Backend(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Backend(_) => 3,
            Failure::Mismatch(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Backend(m) | Failure::Mismatch(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{context}: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Replay { traces } => cmd_replay(&traces),
        Command::Report { run_dir, out } => cmd_report(&run_dir, out.as_deref()),
        Command::ValidateCorpus { corpus } => cmd_validate_corpus(corpus.as_deref()),
        Command::Probe { base_url, model, timeout_ms } => cmd_probe(base_url, model, timeout_ms),
        Command::Scenario { seed, obstacles, cell_size, pgm } => cmd_scenario(seed, obstacles, cell_size, pgm.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn set_path(root: &mut Value, path: &str, value: Value) -> Result<(), Failure> {
    let mut node = root;
    let keys: Vec<&str> = path.split('.').collect();
    for key in &keys[..keys.len() - 1] {
        node = node
            .as_object_mut()
            .and_then(|o| o.get_mut(*key))
            .ok_or_else(|| Failure::Input(format!("--set {path}: no field {key:?}")))?;
    }
    let last = keys[keys.len() - 1];
    let obj = node.as_object_mut().ok_or_else(|| Failure::Input(format!("--set {path}: parent is not an object")))?;
    if !obj.contains_key(last) {
        return Err(Failure::Input(format!("--set {path}: no field {last:?}")));
    }
    obj.insert(last.to_string(), value);
    Ok(())
}

fn read_replies(path: &str) -> Result<Vec<String>, Failure> {
    let text = fs::read_to_string(path).map_err(input(path))?;
    if let Ok(list) = serde_json::from_str::<Vec<String>>(&text) {
        return Ok(list);
    }
    Ok(text.lines().map(str::to_owned).collect())
}

fn remote(args: &RunArgs, model: &str) -> RemoteConfig {
    let mut r = RemoteConfig::new(args.base_url.clone(), model);
    if let Some(t) = args.timeout_ms {
        r.timeout_ms = t;
    }
    if let Some(n) = args.retries {
        r.retries = n;
    }
    r
}

fn llm_slot(spec: &str, args: &RunArgs, seed: u64) -> Result<LlmSlot, Failure> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let slot = |label: &str, params: &str, backend| LlmSlot { label: label.into(), params: params.into(), backend };
    match kind {
        "oracle" => Ok(slot("oracle", "-", BackendConfig::OraclePilot)),
        "noisy" => {
            let rate: f64 = rest.parse().map_err(|_| Failure::Input(format!("--llm noisy:RATE, got {spec:?}")))?;
            Ok(slot("noisy", rest, BackendConfig::Noisy { valid_rate: rate, seed }))
        }
        "remote" if !rest.is_empty() => Ok(slot(rest, "-", BackendConfig::Remote(remote(args, rest)))),
        "scripted" if !rest.is_empty() => {
            Ok(slot("scripted", "-", BackendConfig::Scripted { responses: read_replies(rest)? }))
        }
        _ => Err(Failure::Input(format!("unknown --llm {spec:?}"))),
    }
}

fn vlm_slot(spec: &str, args: &RunArgs) -> Result<VlmSlot, Failure> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let slot = |label: &str, params: &str, channel| VlmSlot { label: label.into(), params: params.into(), channel };
    match kind {
        "noiseless" => Ok(slot("noiseless", "-", VlmChannelConfig::default())),
        "noisy" => {
            let rates: Vec<f64> = rest
                .split(',')
                .map(|r| r.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::Input(format!("--vlm noisy:FP,FN,INVALID, got {spec:?}")))?;
            let [fp, fnr, inv] = rates[..] else {
                return Err(Failure::Input(format!("--vlm noisy needs three rates, got {spec:?}")));
            };
            let noise = DetectorNoise::new(fp, fnr, inv).map_err(input("--vlm"))?;
            Ok(slot("simulated", rest, VlmChannelConfig::Simulated { noise }))
        }
        "remote" if !rest.is_empty() => Ok(slot(&format!("{rest} (text scene)"), "-", VlmChannelConfig::Remote(remote(args, rest)))),
        "scripted" if !rest.is_empty() => Ok(slot("scripted", "-", VlmChannelConfig::Scripted { responses: read_replies(rest)? })),
        _ => Err(Failure::Input(format!("unknown --vlm {spec:?}"))),
    }
}

fn resolve_config(args: &RunArgs) -> Result<RunConfig, Failure> {
    let mut value = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(input(&p.display().to_string()))?;
            let parsed: RunConfig = serde_json::from_str(&text).map_err(input("config"))?;
            serde_json::to_value(parsed).expect("config serializes")
        }
        None => serde_json::to_value(RunConfig::default()).expect("config serializes"),
    };
    for s in &args.sets {
        let (path, raw) = s.split_once('=').ok_or_else(|| Failure::Input(format!("--set expects PATH=VALUE, got {s:?}")))?;
        let v = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        set_path(&mut value, path, v)?;
    }
    let mut c: RunConfig = serde_json::from_value(value).map_err(input("--set"))?;

    if let Some(n) = args.episodes {
        c.episodes = n;
    }
    if let Some(n) = args.obstacles {
        c.scenario.obstacle_count = n;
    }
    if let Some(s) = args.seed {
        c.base_seed = s;
    }
    if let Some(w) = args.workers {
        c.workers = w;
    }
    if let Some(k) = args.k_max {
        c.episode.k_max = k;
    }
    if let Some(h) = args.history {
        c.episode.history_len = h;
    }
    if let Some(t) = args.temperature {
        c.episode.temperature = t;
    }
    if let Some(name) = &args.object_class {
        c.scenario.object_class =
            Some(ObjectClass::parse(name).ok_or_else(|| Failure::Input(format!("unknown object class {name:?}")))?);
    }
    if args.dynamics_noise {
        c.episode.dynamics_noise.enabled = true;
    }
    if args.reveal_obstacles {
        c.episode.reveal_obstacles = true;
    }
    if let Some(spec) = &args.llm {
        c.llm = llm_slot(spec, args, c.base_seed)?;
    }
    if let Some(spec) = &args.vlm {
        c.vlm = vlm_slot(spec, args)?;
    }
    for (flag, target) in [
        (&args.llm_label, &mut c.llm.label),
        (&args.llm_params, &mut c.llm.params),
        (&args.vlm_label, &mut c.vlm.label),
        (&args.vlm_params, &mut c.vlm.params),
    ] {
        if let Some(v) = flag {
            *target = v.clone();
        }
    }
    c.validate().map_err(|e| Failure::Input(e.to_string()))?;
    Ok(c)
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let config = resolve_config(&args)?;
    let out = run_batch(&config, &args.out).map_err(|e| match e {
        BatchError::Metrics(m) => Failure::Backend(m.to_string()),
        other => Failure::Input(other.to_string()),
    })?;
    let csv = fs::read_to_string(out.run_dir.join("report.csv")).map_err(input("report.csv"))?;
    print!("{csv}");
    eprintln!(
        "run directory: {} ({} episodes, {} resumed)",
        out.run_dir.display(),
        config.episodes,
        out.resumed
    );
    if !config.vlm.channel.is_faithful() {
        eprintln!("note: the vision model saw text scene descriptions, not images");
    }
    let r = &out.report;
    if r.llm_inferences == 0 && r.aborted_excluded + r.episodes > 0 {
        let traces = load_run_traces(&out.run_dir).map_err(input("traces"))?;
        if let Some(f) = traces.iter().flat_map(|t| &t.records).find_map(|rec| rec.backend_error.as_ref()) {
            return Err(Failure::Backend(format!("no model reply in the whole run; first error: {}", f.error.class())));
        }
    }
    Ok(())
}

fn trace_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(input(&p.display().to_string()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "jsonl"))
                .collect();
            found.sort();
            if found.is_empty() {
                return Err(Failure::Input(format!("{}: no .jsonl traces", p.display())));
            }
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn cmd_replay(inputs: &[PathBuf]) -> Result<(), Failure> {
    let paths = trace_paths(inputs)?;
    let mut mismatches = Vec::new();
    for path in &paths {
        let name = path.display().to_string();
        let trace = EpisodeTrace::read(path).map_err(input(&name))?;
        let report = replay_trace(&trace).map_err(input(&name))?;
        if report.matches() {
            println!("{name}: ok ({} steps, {:?})", report.steps_checked, report.recorded_outcome);
        } else {
            let at = report.divergence.map_or("outcome".to_string(), |k| format!("step {k}"));
            println!(
                "{name}: MISMATCH at {at} (recorded {:?}, replayed {:?})",
                report.recorded_outcome, report.replayed_outcome
            );
            mismatches.push(name);
        }
    }
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("{} of {} traces diverged", mismatches.len(), paths.len())))
    }
}

fn cmd_report(run_dir: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let traces = load_run_traces(run_dir).map_err(input(&run_dir.display().to_string()))?;
    let report = compute_metrics(&traces).map_err(input(&run_dir.display().to_string()))?;
    let labels = match fs::read_to_string(run_dir.join("config.json")) {
        Ok(text) => serde_json::from_str::<RunConfig>(&text).map_err(input("config.json"))?.labels(),
        Err(_) => Default::default(),
    };
    let csv = csv_report(&report, &labels);
    print!("{csv}");
    if let Some(path) = out {
        fs::write(path, &csv).map_err(input(&path.display().to_string()))?;
    }
    Ok(())
}

fn cmd_validate_corpus(path: Option<&Path>) -> Result<(), Failure> {
    let text = match path {
        Some(p) => fs::read_to_string(p).map_err(input(&p.display().to_string()))?,
        None => BUNDLED_CORPUS.to_string(),
    };
    let cases = load_corpus(&text).map_err(|e| Failure::Input(format!("corpus {e}")))?;
    if cases.is_empty() {
        return Err(Failure::Input("corpus has no cases".into()));
    }
    let mismatches = check_corpus(&cases);
    for m in &mismatches {
        println!("case {}: {:?}\n  - expected {}\n  + got      {}", m.case, m.raw, m.expected, m.got);
    }
    println!("{}/{} cases agree", cases.len() - mismatches.len(), cases.len());
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("{} corpus cases disagree", mismatches.len())))
    }
}

fn cmd_probe(base_url: String, model: String, timeout_ms: u64) -> Result<(), Failure> {
    let config = RemoteConfig { timeout_ms, ..RemoteConfig::new(base_url, model.clone()) };
    config.validate().map_err(Failure::Input)?;
    let request = CompletionRequest::new(
        "Reply with exactly: Move(1.0);".into(),
        vec!["Connectivity check.".into()],
        model,
    );
    match RemoteClient::new(config).complete(&request) {
        Ok(reply) => {
            println!("latency_ms: {:.1}", reply.latency_ms);
            println!("reply: {:?}", reply.text);
            Ok(())
        }
        Err(e) => Err(Failure::Backend(format!("{}: {e}", e.class()))),
    }
}

fn cmd_scenario(seed: u64, obstacles: usize, cell_size: f64, pgm: Option<&Path>) -> Result<(), Failure> {
    let scenario = generate_scenario(&ScenarioConfig { obstacle_count: obstacles, seed, ..Default::default() })
        .map_err(input("scenario"))?;
    println!("{}", scenario.to_json());
    if let Some(path) = pgm {
        let grid = rasterize(&scenario, cell_size).map_err(input("grid"))?;
        fs::write(path, grid.to_pgm()).map_err(input(&path.display().to_string()))?;
    }
    Ok(())
}
