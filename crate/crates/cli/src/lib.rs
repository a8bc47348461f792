//! The `tce` command.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use tangram_core::pipeline::{gen_task1, gen_task2, DistractorPool, normalize, read_raw_jsonl, render_outline, render_pieces, NormalizeError, PromptBundle, Variant, SNAP_TOL};
use tangram_core::solver::{generate_instances, solve, GenerateConfig, SolveOutcome, SolverConfig};
use tangram_core::tangram::{parse_document, parse_outline, parse_tce, serialize_tce, state_json, Field, TceInstance};
use tangram_core::verify::{records_jsonl, render_csv, render_text};
use tangram_harness::{call_gateway, read_keys, read_responses, run_task2, score_task1, write_responses};
use tangram_service::{port_from_env, ServeConfig, DEFAULT_PORT};
use thiserror::Error;

pub mod config;
pub mod manifest;

use config::Config;
use manifest::RunManifest;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Unsolved(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Unsolved(_) => 3,
        }
    }
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "tce", version, about = "Tangram construction benchmark toolkit")]
pub struct Cli {
    /// TOML configuration file (defaults to $TCE_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Where to write the run manifest.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Filter, snap and normalize raw annotation exports into TCE files.
    Normalize(NormalizeArgs),
    /// Build multiple-choice silhouette items from a TCE directory.
    GenTask1(GenTask1Args),
    /// Build construction prompts from a TCE directory.
    GenTask2(GenTask2Args),
    /// Verify construction responses against ground truth.
    Verify(VerifyArgs),
    /// Score multiple-choice responses.
    ScoreTask1(ScoreTask1Args),
    /// Solve a target outline with the seven pieces.
    Solve(SolveArgs),
    /// Generate a corpus of solver-built instances.
    GenCorpus(GenCorpusArgs),
    /// Render an outline or an assembly as SVG.
    Render(RenderArgs),
    /// Send construction prompts to a model endpoint.
    Query(QueryArgs),
    /// Run the local HTTP service.
    Serve(ServeArgs),
}

#[derive(Args, Debug)]
struct NormalizeArgs {
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct GenTask1Args {
    tce_dir: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct GenTask2Args {
    tce_dir: PathBuf,
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    shots: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    responses: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// CSV report path.
    #[arg(long)]
    report: PathBuf,
    /// Optional per-instance records (JSON lines).
    #[arg(long)]
    records: Option<PathBuf>,
    /// Row label in the report.
    #[arg(long, default_value = "submission")]
    label: String,
}

#[derive(Args, Debug)]
struct ScoreTask1Args {
    responses: PathBuf,
    #[arg(long)]
    keys: PathBuf,
    /// Optional CSV report path.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    outline: PathBuf,
    /// Enumerate every tiling instead of stopping at the first.
    #[arg(long)]
    all: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    max_nodes: Option<u64>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
}

#[derive(Args, Debug)]
struct GenCorpusArgs {
    #[arg(long)]
    count: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RenderArgs {
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Render the final_state pieces instead of the outline.
    #[arg(long)]
    assembly: bool,
    /// Label outline vertices with their exact coordinates.
    #[arg(long)]
    annotate: bool,
}

#[derive(Args, Debug)]
struct QueryArgs {
    prompts: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    endpoint: Option<String>,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long)]
    port: Option<u16>,
    #[arg(long)]
    host: Option<std::net::IpAddr>,
    /// Permit binding a non-loopback address.
    #[arg(long)]
    allow_remote: bool,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Normalize(_) => "normalize",
            Command::GenTask1(_) => "gen-task1",
            Command::GenTask2(_) => "gen-task2",
            Command::Verify(_) => "verify",
            Command::ScoreTask1(_) => "score-task1",
            Command::Solve(_) => "solve",
            Command::GenCorpus(_) => "gen-corpus",
            Command::Render(_) => "render",
            Command::Query(_) => "query",
            Command::Serve(_) => "serve",
        }
    }

    fn output_dir(&self) -> Option<&Path> {
        match self {
            Command::Normalize(a) => Some(&a.out),
            Command::GenTask1(a) => Some(&a.out),
            Command::GenTask2(a) => Some(&a.out),
            Command::GenCorpus(a) => Some(&a.out),
            _ => None,
        }
    }

    fn output_file(&self) -> Option<&Path> {
        match self {
            Command::Verify(a) => Some(&a.report),
            Command::ScoreTask1(a) => a.report.as_deref(),
            Command::Solve(a) => a.out.as_deref(),
            Command::Render(a) => Some(&a.out),
            Command::Query(a) => Some(&a.out),
            _ => None,
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let args = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let mut m = RunManifest::start(cli.command.name(), args);
    let manifest_path = cli.manifest.clone().unwrap_or_else(|| m.default_path(cli.command.output_dir(), cli.command.output_file()));
    let result = config::load(cli.config.as_deref()).and_then(|(cfg, path)| {
        m.config_path = path;
        dispatch(&cli.command, &cfg, &mut m, &manifest_path)
    });
    let code = match &result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    m.finish(code);
    if let Err(e) = m.write(&manifest_path) {
        eprintln!("warning: cannot write manifest {}: {e}", manifest_path.display());
    }
    code
}

fn dispatch(cmd: &Command, cfg: &Config, m: &mut RunManifest, manifest_path: &Path) -> Result<(), CliError> {
    match cmd {
        Command::Normalize(a) => cmd_normalize(a, cfg, m),
        Command::GenTask1(a) => cmd_gen_task1(a, cfg, m),
        Command::GenTask2(a) => cmd_gen_task2(a, cfg, m),
        Command::Verify(a) => cmd_verify(a, cfg, m),
        Command::ScoreTask1(a) => cmd_score_task1(a, m),
        Command::Solve(a) => cmd_solve(a, cfg, m),
        Command::GenCorpus(a) => cmd_gen_corpus(a, cfg, m),
        Command::Render(a) => cmd_render(a, m),
        Command::Query(a) => cmd_query(a, cfg, m),
        Command::Serve(a) => cmd_serve(a, cfg, m, manifest_path),
    }
}

fn read(path: &Path, m: &mut RunManifest) -> Result<String, CliError> {
    m.inputs.push(path.to_path_buf());
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str, m: &mut RunManifest) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    m.outputs.push(path.to_path_buf());
    Ok(())
}

fn make_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))
}

/// Every `*.json` TCE document in a directory (manifests excluded), sorted by
/// instance id.
pub fn load_corpus(dir: &Path) -> Result<Vec<TceInstance>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::Data(format!("cannot read {}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json") && !p.file_name().is_some_and(|n| n.to_string_lossy().ends_with("manifest.json")))
        .collect();
    paths.sort();
    let mut out = Vec::with_capacity(paths.len());
    for p in paths {
        let text = fs::read_to_string(&p).map_err(|e| CliError::Data(format!("cannot read {}: {e}", p.display())))?;
        match parse_tce(&text) {
            (Some(i), r) if r.is_empty() => out.push(i),
            (_, r) => {
                let first = r.violations.first().map(|v| format!("{}: {}", v.path, v.message)).unwrap_or_default();
                return Err(CliError::Data(format!("{} is not a valid TCE document ({first})", p.display())));
            }
        }
    }
    out.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
    Ok(out)
}

fn reject_code(e: &NormalizeError) -> &'static str {
    match e {
        NormalizeError::Rejected(r) => r.code(),
        NormalizeError::NonCanonical(_) => "non-canonical",
        NormalizeError::Approximate => "approximate",
        NormalizeError::Verify(_) => "verify",
    }
}

fn cmd_normalize(a: &NormalizeArgs, cfg: &Config, m: &mut RunManifest) -> Result<(), CliError> {
    let tol = a.tol.or(cfg.normalize.tol).unwrap_or(SNAP_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    m.settings = json!({"tol": tol});
    let text = read(&a.input, m)?;
    make_dir(&a.out)?;
    let lines: Vec<(usize, &str)> = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).map(|(i, l)| (i + 1, l)).collect();
    let parsed = read_raw_jsonl(&text);
    let mut log = String::new();
    let mut seen = HashSet::new();
    let (mut accepted, mut rejected) = (0usize, 0usize);
    for ((line, _), raw) in lines.into_iter().zip(parsed) {
        let entry = match raw.map_err(|e| ("parse", e.to_string())).and_then(|r| normalize(&r, tol, None).map_err(|e| (reject_code(&e), e.to_string()))) {
            Ok(inst) if !seen.insert(inst.instance_id.clone()) => {
                rejected += 1;
                json!({"line": line, "status": "rejected", "reason": "duplicate", "instance_id": inst.instance_id})
            }
            Ok(inst) => {
                accepted += 1;
                write(&a.out.join(format!("{}.json", inst.instance_id)), &serialize_tce(&inst), m)?;
                json!({"line": line, "status": "accepted", "instance_id": inst.instance_id})
            }
            Err((reason, message)) => {
                rejected += 1;
                json!({"line": line, "status": "rejected", "reason": reason, "message": message})
            }
        };
        log.push_str(&entry.to_string());
        log.push('\n');
    }
    write(&a.out.join("normalize_log.jsonl"), &log, m)?;
    eprintln!("accepted {accepted}, rejected {rejected}");
    Ok(())
}

fn cmd_gen_task1(a: &GenTask1Args, cfg: &Config, m: &mut RunManifest) -> Result<(), CliError> {
    let seed = a.seed.or(cfg.seed).unwrap_or(0);
    m.seed = Some(seed);
    m.inputs.push(a.tce_dir.clone());
    let corpus = load_corpus(&a.tce_dir)?;
    let entries: Vec<(String, _)> = corpus.iter().map(|i| (i.instance_id.clone(), i.target_outline.clone())).collect();
    let pool = DistractorPool::new(&entries).map_err(data)?;
    let mut items = Vec::with_capacity(corpus.len());
    for inst in &corpus {
        let item = gen_task1(inst, &pool, seed).map_err(|e| CliError::Data(format!("{}: {e}", inst.instance_id)))?;
        items.push(item);
    }
    make_dir(&a.out)?;
    let mut keys = String::new();
    for item in &items {
        write(&a.out.join(format!("{}.svg", item.instance_id)), &item.render_svg(), m)?;
        keys.push_str(&item.sidecar().to_string());
        keys.push('\n');
    }
    write(&a.out.join("answers.jsonl"), &keys, m)?;
    eprintln!("{} items", items.len());
    Ok(())
}

fn cmd_gen_task2(a: &GenTask2Args, cfg: &Config, m: &mut RunManifest) -> Result<(), CliError> {
    let variant: Variant = a.variant.as_deref().or(cfg.task2.variant.as_deref()).unwrap_or("full").parse().map_err(CliError::Usage)?;
    let shots = a.shots.or(cfg.task2.shots).unwrap_or(0);
    m.settings = json!({"variant": variant, "shots": shots});
    m.inputs.push(a.tce_dir.clone());
    let corpus = load_corpus(&a.tce_dir)?;
    if !corpus.is_empty() && shots >= corpus.len() {
        return Err(CliError::Data(format!("{shots} exemplars need at least {} instances, found {}", shots + 1, corpus.len())));
    }
    make_dir(&a.out)?;
    let mut lines = String::new();
    for inst in &corpus {
        let exemplars: Vec<TceInstance> = corpus.iter().filter(|e| e.instance_id != inst.instance_id).take(shots).cloned().collect();
        let bundle = gen_task2(inst, variant, &exemplars);
        write(&a.out.join(format!("{}.svg", inst.instance_id)), &bundle.image_svg, m)?;
        lines.push_str(&serde_json::to_string(&bundle).expect("bundles serialize"));
        lines.push('\n');
    }
    write(&a.out.join("prompts.jsonl"), &lines, m)?;
    eprintln!("{} prompts", corpus.len());
    Ok(())
}

fn cmd_verify(a: &VerifyArgs, cfg: &Config, m: &mut RunManifest) -> Result<(), CliError> {
    m.settings = json!({"verify": cfg.verify});
    let responses = read_responses(&read(&a.responses, m)?).map_err(|e| CliError::Data(format!("{}: {e}", a.responses.display())))?;
    m.inputs.push(a.truth.clone());
    let truths = load_corpus(&a.truth)?;
    let run = run_task2(&responses, &truths, &cfg.verify).map_err(data)?;
    let rows = vec![(a.label.clone(), run.report)];
    write(&a.report, &render_csv(&rows), m)?;
    if let Some(p) = &a.records {
        write(p, &records_jsonl(&run.records), m)?;
    }
    print!("{}", render_text(&rows));
    Ok(())
}

fn cmd_score_task1(a: &ScoreTask1Args, m: &mut RunManifest) -> Result<(), CliError> {
    let responses = read_responses(&read(&a.responses, m)?).map_err(|e| CliError::Data(format!("{}: {e}", a.responses.display())))?;
    let keys = read_keys(&read(&a.keys, m)?).map_err(|e| CliError::Data(format!("{}: {e}", a.keys.display())))?;
    let score = score_task1(&responses, &keys).map_err(data)?;
    if let Some(p) = &a.report {
        write(p, &score.render_csv(), m)?;
    }
    print!("{}", score.render_text());
    Ok(())
}

fn cmd_solve(a: &SolveArgs, cfg: &Config, m: &mut RunManifest) -> Result<(), CliError> {
    let mut scfg = SolverConfig { find_all: a.all, ..SolverConfig::default() };
    if let Some(n) = a.max_nodes.or(cfg.solver.max_nodes) {
        scfg.max_nodes = n;
    }
    if let Some(t) = a.time_limit.or(cfg.solver.time_limit_secs) {
        scfg.time_limit = Duration::try_from_secs_f64(t).map_err(|_| CliError::Usage("--time-limit must be a non-negative number of seconds".into()))?;
    }
    m.settings = json!({"max_nodes": scfg.max_nodes, "time_limit_secs": scfg.time_limit.as_secs_f64(), "all": a.all});
    let text = read(&a.outline, m)?;
    let outline = parse_outline(&text).map_err(|r| {
        let first = r.violations.first().map(|v| format!("{}: {}", v.path, v.message)).unwrap_or_default();
        CliError::Data(format!("{} has no readable outline ({first})", a.outline.display()))
    })?;
    let outcome = solve(&outline, &scfg).map_err(data)?;
    let (result, unsolved) = match &outcome {
        SolveOutcome::Solved { solutions, complete, stats } => (
            json!({"status": "solved", "complete": complete, "stats": stats, "solutions": solutions.iter().map(|s| state_json(s)).collect::<Vec<_>>()}),
            None,
        ),
        SolveOutcome::Unsat { reason, stats } => (json!({"status": "unsat", "reason": reason, "stats": stats}), Some(format!("unsat: {}", json!(reason).as_str().unwrap_or("")))),
        SolveOutcome::Exhausted { stats } => (json!({"status": "exhausted", "stats": stats}), Some("search budget exhausted".to_owned())),
    };
    let text = serde_json::to_string_pretty(&result).expect("results serialize") + "\n";
    match &a.out {
        Some(p) => write(p, &text, m)?,
        None => print!("{text}"),
    }
    unsolved.map_or(Ok(()), |msg| Err(CliError::Unsolved(msg)))
}

fn cmd_gen_corpus(a: &GenCorpusArgs, cfg: &Config, m: &mut RunManifest) -> Result<(), CliError> {
    let seed = a.seed.or(cfg.seed).unwrap_or(0);
    m.seed = Some(seed);
    m.settings = json!({"count": a.count});
    let generated = generate_instances(a.count, seed, &GenerateConfig::default());
    if let Some(w) = &generated.warning {
        eprintln!("warning: {w}");
    }
    make_dir(&a.out)?;
    for inst in &generated.instances {
        write(&a.out.join(format!("{}.json", inst.instance_id)), &serialize_tce(inst), m)?;
    }
    eprintln!("{} instances", generated.instances.len());
    Ok(())
}

fn cmd_render(a: &RenderArgs, m: &mut RunManifest) -> Result<(), CliError> {
    let text = read(&a.input, m)?;
    let svg = if a.assembly {
        let doc = parse_document(&text, &[Field::FinalState]);
        match doc.final_state {
            Some(p) if doc.report.is_empty() && !p.is_empty() => render_pieces(&p),
            _ => return Err(CliError::Data(format!("{} has no readable final_state", a.input.display()))),
        }
    } else {
        let o = parse_outline(&text).map_err(|_| CliError::Data(format!("{} has no readable outline", a.input.display())))?;
        render_outline(&o, a.annotate)
    };
    write(&a.out, &svg, m)
}

fn cmd_query(a: &QueryArgs, cfg: &Config, m: &mut RunManifest) -> Result<(), CliError> {
    let mut g = cfg.gateway.clone();
    if let Some(model) = &a.model {
        g.model = model.clone();
    }
    if let Some(e) = &a.endpoint {
        g.endpoint = e.clone();
    }
    m.settings = json!({"gateway": g});
    let text = read(&a.prompts, m)?;
    let bundles = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str::<PromptBundle>(l).map_err(|e| CliError::Data(format!("{} line {}: {e}", a.prompts.display(), i + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    let records = call_gateway(&bundles, 2, &g).map_err(|e| CliError::Usage(e.to_string()))?;
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    write(&a.out, &write_responses(&records), m)?;
    eprintln!("{} responses, {failed} failed", records.len());
    Ok(())
}

fn cmd_serve(a: &ServeArgs, cfg: &Config, m: &mut RunManifest, manifest_path: &Path) -> Result<(), CliError> {
    let port = match a.port {
        Some(p) => p,
        None => port_from_env().map_err(|e| CliError::Usage(e.to_string()))?.or(cfg.service.port).unwrap_or(DEFAULT_PORT),
    };
    let defaults = ServeConfig::default();
    let sc = ServeConfig {
        host: a.host.or(cfg.service.host).unwrap_or(defaults.host),
        port,
        allow_remote: a.allow_remote || cfg.service.allow_remote.unwrap_or(false),
    };
    sc.addr().map_err(|e| CliError::Usage(e.to_string()))?;
    m.settings = json!({"host": sc.host, "port": sc.port, "allow_remote": sc.allow_remote});
    let _ = m.write(manifest_path);
    tangram_service::run(&sc, |addr| {
        eprintln!("listening on http://{addr}");
    })
    .map_err(data)
}

