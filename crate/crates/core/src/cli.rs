//! Command-line front end. `run` returns the process exit code: 0 on
//! success, 1 on domain errors, 2 on usage errors.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::eval::{
    enumerate_pure_nash, simulate_root_value, to_normal_form, value_function, BehavioralProfile, EvalError,
};
use crate::extraction::{
    self, build_draft, compile_draft, default_protocol, write_pairs, ExtractionError, FixtureClient,
    GenerationClient, HttpClient, HttpConfig, Protocol, RecordingClient, TopologyHints, API_KEY_ENV,
};
use crate::format::{parse_game, write_game, FormatError, GameFormat};
use crate::game::{validate, Game, Severity};
use crate::narrative::{
    self, export_shape, fixtures, rationalization, shape_curve, story_path, NarrativeError, ShapeFormat, StorySpec,
};
use crate::qre::{trace_lle, LambdaSchedule, QreError, SolveReport, TraceOptions};
use crate::tolerance::ENUMERATION_BUDGET;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("{path}: {source}")]
    Story { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Solver(#[from] QreError),
    #[error(transparent)]
    Narrative(#[from] NarrativeError),
    #[error(transparent)]
    Extraction(#[from] ExtractionError),
}

impl CliError {
    /// Stable short code printed with every error.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Format { .. } | CliError::Story { .. } => "parse",
            CliError::Eval(_) => "eval",
            CliError::Solver(_) => "solver",
            CliError::Narrative(_) => "narrative",
            CliError::Extraction(_) => "extraction",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Json,
    Csv,
    Svg,
    Efg,
}

#[derive(Debug, Parser)]
#[command(name = "storygame", version, about = "Stories as extensive-form games")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a game between .efg and JSON.
    Convert(ConvertArgs),
    /// Trace the logit path and report the limiting logit equilibrium.
    Solve(SolveArgs),
    /// Validate a game and summarize its strategic structure.
    Analyze(AnalyzeArgs),
    /// Check whether a story's path has positive probability in equilibrium.
    Rationalize(StoryArgs),
    /// Value, surprise and suspense along a story's path.
    Shape(ShapeArgs),
    /// Elicit a game draft from story text through a generation service.
    #[command(after_help = format!("The http client sends the value of ${API_KEY_ENV} as a bearer token."))]
    Extract(ExtractArgs),
    /// Write the Romeo-and-Juliet fixture files.
    Fixtures(FixturesArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long = "format", visible_aliases = ["out", "to"], value_enum)]
    pub format: Option<OutFormat>,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Fixed-point residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.01)]
    pub lambda_start: f64,
    #[arg(long, default_value_t = 1.25)]
    pub lambda_factor: f64,
    #[arg(long, default_value_t = 60)]
    pub lambda_steps: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub purify_delta: f64,
    /// Run every rung instead of stopping once the purified profile settles.
    #[arg(long)]
    pub full_ladder: bool,
}

impl SolverArgs {
    fn schedule(&self) -> Result<LambdaSchedule, CliError> {
        LambdaSchedule::geometric(self.lambda_start, self.lambda_factor, self.lambda_steps)
            .map_err(|e| CliError::Usage(e.to_string()))
    }

    fn options(&self) -> Result<TraceOptions, CliError> {
        if !(self.tol > 0.0) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        if !(self.purify_delta > 0.0 && self.purify_delta < 0.5) {
            return Err(CliError::Usage("--purify-delta must lie in (0, 0.5)".into()));
        }
        let mut o = TraceOptions::default();
        o.fixed_point.tol = self.tol;
        o.purify_delta = self.purify_delta;
        if self.full_ladder {
            o.stable_rungs = None;
        }
        Ok(o)
    }

    fn solve(&self, g: &Game) -> Result<SolveReport, CliError> {
        Ok(trace_lle(g, &self.schedule()?, &self.options()?)?)
    }
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub game: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Include every rung in JSON output.
    #[arg(long)]
    pub trace: bool,
    /// Include wall time (makes output non-reproducible).
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub game: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Monte-Carlo rollouts of the root value under the solved profile (0 = skip).
    #[arg(long, default_value_t = 0)]
    pub rollouts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct StoryArgs {
    pub game: PathBuf,
    /// Story JSON: characters, actions, annotations.
    #[arg(long)]
    pub story: PathBuf,
    /// Path-probability threshold.
    #[arg(long = "rationalize-tol", default_value_t = narrative::RATIONALIZE_TOL)]
    pub rationalize_tol: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    #[command(flatten)]
    pub story: StoryArgs,
    /// Keep only the root, decision nodes and the outcome.
    #[arg(long)]
    pub decisions_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClientKind {
    Fixture,
    Http,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Story text file.
    #[arg(long)]
    pub story: PathBuf,
    #[arg(long, value_enum, default_value_t = ClientKind::Fixture)]
    pub client: ClientKind,
    /// Directory of recorded request/response pairs (fixture client).
    #[arg(long, default_value = "fixtures/transcripts")]
    pub fixtures_dir: PathBuf,
    /// Protocol JSON; defaults to the built-in protocol.
    #[arg(long)]
    pub protocol: Option<PathBuf>,
    /// Topology hints JSON; when given, the draft is compiled to a game.
    #[arg(long)]
    pub hints: Option<PathBuf>,
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long, default_value = "")]
    pub model: String,
    /// Request timeout in seconds.
    #[arg(long, default_value_t = 60)]
    pub timeout: u64,
    #[arg(long, default_value_t = 2)]
    pub retries: u32,
    /// Save every request/response pair to this directory.
    #[arg(long)]
    pub record: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FixturesArgs {
    /// Target directory.
    #[arg(long = "fixtures-dir", default_value = "fixtures")]
    pub dir: PathBuf,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn game_format(path: &Path) -> Result<GameFormat, CliError> {
    GameFormat::from_path(path)
        .ok_or_else(|| CliError::Usage(format!("{}: expected a .efg or .json file", path.display())))
}

pub fn load_game(path: &Path) -> Result<Game, CliError> {
    let fmt = game_format(path)?;
    parse_game(&read(path)?, fmt).map_err(|source| CliError::Format { path: path.to_path_buf(), source })
}

fn load_story(path: &Path) -> Result<StorySpec, CliError> {
    StorySpec::from_json(&read(path)?).map_err(|source| CliError::Story { path: path.to_path_buf(), source })
}

fn allow(fmt: Option<OutFormat>, allowed: &[OutFormat], default: OutFormat, cmd: &str) -> Result<OutFormat, CliError> {
    let f = fmt.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Usage(format!("`{cmd}` does not support --format {f:?}").to_lowercase()))
    }
}

struct Sink<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Sink<'_> {
    fn warn(&mut self, msg: impl std::fmt::Display) {
        let _ = writeln!(self.stderr, "warning: {msg}");
    }

    fn emit(&mut self, out: &OutputArgs, bytes: &[u8]) -> Result<(), CliError> {
        match &out.output {
            Some(p) => write_file(p, bytes),
            None => self
                .stdout
                .write_all(bytes)
                .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source }),
        }
    }
}

fn fmt_profile(g: &Game, s: &BehavioralProfile) -> String {
    let mut out = String::new();
    for iset in g.infosets() {
        let probs: Vec<String> = iset
            .actions
            .iter()
            .zip(s.get(iset.id))
            .map(|(a, p)| format!("{a} {}", fmt_prob(*p)))
            .collect();
        writeln!(out, "  {} [{}]: {}", g.players()[iset.owner].name, iset.name, probs.join(", ")).unwrap();
    }
    out
}

fn fmt_prob(p: f64) -> String {
    let s = format!("{p:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" { "0".into() } else { s.to_string() }
}

fn solve_text(g: &Game, r: &SolveReport) -> String {
    let mut out = fmt_profile(g, &r.profile);
    writeln!(
        out,
        "verified: {} (max regret {:.3e}, epsilon {:e})",
        r.verification.is_eps_nash,
        r.verification.max_regret(),
        r.verification.epsilon
    )
    .unwrap();
    out
}

fn cmd_convert(a: &ConvertArgs, sink: &mut Sink) -> Result<(), CliError> {
    let g = load_game(&a.input)?;
    let from = game_format(&a.input)?;
    let default = match from {
        GameFormat::Efg => OutFormat::Json,
        GameFormat::Json => OutFormat::Efg,
    };
    let to = match allow(a.out.format, &[OutFormat::Json, OutFormat::Efg], default, "convert")? {
        OutFormat::Efg => GameFormat::Efg,
        _ => GameFormat::Json,
    };
    sink.emit(&a.out, write_game(&g, to).as_bytes())
}

fn cmd_solve(a: &SolveArgs, sink: &mut Sink) -> Result<(), CliError> {
    let g = load_game(&a.game)?;
    let r = a.solver.solve(&g)?;
    for w in &r.warnings {
        sink.warn(w);
    }
    let bytes = match a.out.format {
        None => solve_text(&g, &r),
        Some(f) => match allow(Some(f), &[OutFormat::Json, OutFormat::Csv], f, "solve")? {
            OutFormat::Csv => r.trace_csv(&g),
            _ => pretty(&r.to_json(&g, a.trace, a.timing)),
        },
    };
    sink.emit(&a.out, bytes.as_bytes())
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn cmd_analyze(a: &AnalyzeArgs, sink: &mut Sink) -> Result<(), CliError> {
    let g = load_game(&a.game)?;
    let fmt = allow(a.out.format, &[OutFormat::Json], OutFormat::Json, "analyze").ok();
    let diags = validate(&g);
    let count = |f: fn(&crate::game::Node) -> bool| g.nodes().iter().filter(|n| f(n)).count();
    let (dec, cha, ter) = (count(|n| n.is_decision()), count(|n| n.is_chance()), count(|n| n.is_terminal()));

    let nf = to_normal_form(&g, ENUMERATION_BUDGET);
    let (strategies, pure_nash): (Vec<usize>, Vec<String>) = match &nf {
        Ok(nf) => (
            nf.strategies.iter().map(|s| s.len()).collect(),
            enumerate_pure_nash(nf).iter().map(|p| nf.describe_profile(&g, p)).collect(),
        ),
        Err(_) => (Vec::new(), Vec::new()),
    };
    let r = a.solver.solve(&g)?;
    let root = value_function(&g, &r.profile)?.at(g.root()).to_vec();
    let mc = if a.rollouts > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        Some(simulate_root_value(&g, &r.profile, a.rollouts, &mut rng)?)
    } else {
        None
    };

    let text = if a.out.format.is_some() && fmt == Some(OutFormat::Json) {
        pretty(&json!({
            "title": g.title(),
            "players": g.players().iter().map(|p| &p.name).collect::<Vec<_>>(),
            "nodes": {"total": g.num_nodes(), "decision": dec, "chance": cha, "terminal": ter},
            "infosets": g.infosets().len(),
            "diagnostics": diags.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "reduced_strategies": strategies,
            "normal_form_error": nf.as_ref().err().map(|e| e.to_string()),
            "pure_nash": pure_nash,
            "lle": r.profile.to_json(&g),
            "lle_verified": r.is_verified(),
            "root_value": root,
            "monte_carlo": mc.map(|m| json!({"rollouts": m.rollouts, "seed": a.seed, "mean": m.mean, "std_err": m.std_err})),
        }))
    } else if a.out.format.is_some() {
        return Err(CliError::Usage("`analyze` supports --format json only".into()));
    } else {
        let mut out = String::new();
        writeln!(out, "game: {}", g.title()).unwrap();
        let names: Vec<&str> = g.players().iter().map(|p| p.name.as_str()).collect();
        writeln!(out, "players: {}", names.join(", ")).unwrap();
        writeln!(out, "nodes: {} ({dec} decision, {cha} chance, {ter} terminal)", g.num_nodes()).unwrap();
        for iset in g.infosets() {
            writeln!(
                out,
                "infoset {} [{}]: {} member(s), actions {}",
                g.players()[iset.owner].name,
                iset.name,
                iset.members.len(),
                iset.actions.join("/")
            )
            .unwrap();
        }
        if diags.is_empty() {
            writeln!(out, "validation: ok").unwrap();
        }
        for d in &diags {
            let sev = if d.severity == Severity::Error { "error" } else { "warning" };
            writeln!(out, "validation {sev}: {d}").unwrap();
        }
        match &nf {
            Ok(_) => {
                let counts: Vec<String> = names.iter().zip(&strategies).map(|(n, c)| format!("{n} {c}")).collect();
                writeln!(out, "reduced pure strategies: {}", counts.join(", ")).unwrap();
                writeln!(out, "pure Nash equilibria: {}", pure_nash.len()).unwrap();
                for p in &pure_nash {
                    writeln!(out, "  {p}").unwrap();
                }
            }
            Err(e) => writeln!(out, "normal form skipped: {e}").unwrap(),
        }
        writeln!(out, "limiting logit equilibrium (verified: {}):", r.is_verified()).unwrap();
        out.push_str(&fmt_profile(&g, &r.profile));
        let vals: Vec<String> = names.iter().zip(&root).map(|(n, v)| format!("{n} {}", fmt_prob(*v))).collect();
        writeln!(out, "root value: {}", vals.join(", ")).unwrap();
        if let Some(m) = mc {
            let means: Vec<String> = m
                .mean
                .iter()
                .zip(&m.std_err)
                .map(|(v, s)| format!("{} ± {}", fmt_prob(*v), fmt_prob(*s)))
                .collect();
            writeln!(out, "monte carlo ({} rollouts, seed {}): {}", m.rollouts, a.seed, means.join(", ")).unwrap();
        }
        out
    };
    sink.emit(&a.out, text.as_bytes())
}

fn cmd_rationalize(a: &StoryArgs, sink: &mut Sink) -> Result<(), CliError> {
    let g = load_game(&a.game)?;
    let story = load_story(&a.story)?;
    let path = story_path(&g, &story)?;
    let r = a.solver.solve(&g)?;
    let res = rationalization(&g, &r.profile, &path, a.rationalize_tol)?;
    let text = match a.out.format {
        None => format!("rationalized: {}, path probability {}\n", res.rationalized, res.path_probability),
        Some(f) => {
            allow(Some(f), &[OutFormat::Json], f, "rationalize")?;
            pretty(&json!({
                "game": g.title(),
                "actions": story.actions,
                "rationalized": res.rationalized,
                "path_probability": res.path_probability,
                "tol": a.rationalize_tol,
                "profile": r.profile.to_json(&g),
            }))
        }
    };
    sink.emit(&a.out, text.as_bytes())
}

fn cmd_shape(a: &ShapeArgs, sink: &mut Sink) -> Result<(), CliError> {
    let s = &a.story;
    let g = load_game(&s.game)?;
    let story = load_story(&s.story)?;
    let path = story_path(&g, &story)?;
    let r = s.solver.solve(&g)?;
    let mut series = shape_curve(&g, &r.profile, &path)?;
    if a.decisions_only {
        series = series.decisions_only();
    }
    let fmt = match allow(s.out.format, &[OutFormat::Csv, OutFormat::Json, OutFormat::Svg], OutFormat::Csv, "shape")? {
        OutFormat::Json => ShapeFormat::Json,
        OutFormat::Svg => ShapeFormat::Svg,
        _ => ShapeFormat::Csv,
    };
    sink.emit(&s.out, &export_shape(&series, fmt))
}

fn cmd_extract(a: &ExtractArgs, sink: &mut Sink) -> Result<(), CliError> {
    let story = read(&a.story)?;
    let story = story.trim();
    let protocol: Protocol = match &a.protocol {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|source| CliError::Story { path: p.clone(), source })?,
        None => default_protocol(),
    };
    let client: Box<dyn GenerationClient> = match a.client {
        ClientKind::Fixture => Box::new(FixtureClient::open(&a.fixtures_dir).map_err(ExtractionError::from)?),
        ClientKind::Http => {
            let endpoint = a
                .endpoint
                .clone()
                .ok_or_else(|| CliError::Usage("--client http needs --endpoint".into()))?;
            let mut cfg = HttpConfig::new(endpoint, a.model.clone());
            cfg.timeout = Duration::from_secs(a.timeout);
            cfg.retries = a.retries;
            Box::new(HttpClient::new(cfg))
        }
    };
    let rec = RecordingClient::new(client);
    let draft = build_draft(story, &protocol, &rec);
    if let Some(dir) = &a.record {
        write_pairs(dir, &rec.pairs()).map_err(|source| CliError::Io { path: dir.clone(), source })?;
    }
    let draft = draft?;
    let bytes = match &a.hints {
        None => {
            allow(a.out.format, &[OutFormat::Json], OutFormat::Json, "extract without --hints")?;
            draft.to_json()
        }
        Some(h) => {
            let hints = TopologyHints::from_json(&read(h)?)?;
            let compiled = compile_draft(&draft, &hints)?;
            match allow(a.out.format, &[OutFormat::Json, OutFormat::Efg], OutFormat::Json, "extract")? {
                OutFormat::Efg => write_game(&compiled.game, GameFormat::Efg),
                _ => write_game(&compiled.game, GameFormat::Json),
            }
        }
    };
    sink.emit(&a.out, bytes.as_bytes())
}

/// Every file the `fixtures` subcommand writes, as (relative path, bytes).
pub fn fixture_files() -> Vec<(PathBuf, Vec<u8>)> {
    let g1 = fixtures::romeo_juliet_game1();
    let g2 = fixtures::romeo_juliet_game2();
    let mut files = vec![
        (PathBuf::from("game1.efg"), write_game(&g1, GameFormat::Efg).into_bytes()),
        (PathBuf::from("game1.json"), write_game(&g1, GameFormat::Json).into_bytes()),
        (PathBuf::from("game2.efg"), write_game(&g2, GameFormat::Efg).into_bytes()),
        (PathBuf::from("game2.json"), write_game(&g2, GameFormat::Json).into_bytes()),
        (PathBuf::from("actual_path.json"), fixtures::actual_story_game2().to_json().into_bytes()),
        (PathBuf::from("actual_path_game1.json"), fixtures::actual_story_game1().to_json().into_bytes()),
        (PathBuf::from("equilibrium_path_game1.json"), fixtures::equilibrium_story_game1().to_json().into_bytes()),
        (PathBuf::from("marry_paris_path.json"), fixtures::marry_paris_story().to_json().into_bytes()),
        (PathBuf::from("game2_hints.json"), extraction::romeo_juliet::topology_hints().to_json().into_bytes()),
        (PathBuf::from("protocol.json"), pretty(&serde_json::to_value(extraction::romeo_juliet::protocol()).unwrap()).into_bytes()),
        (PathBuf::from("story.txt"), format!("{}\n", extraction::romeo_juliet::story_context()).into_bytes()),
    ];
    for (i, p) in extraction::romeo_juliet::record_transcripts().iter().enumerate() {
        let mut text = serde_json::to_string_pretty(p).expect("pair serializes");
        text.push('\n');
        files.push((PathBuf::from("transcripts").join(format!("{:03}.json", i + 1)), text.into_bytes()));
    }
    files
}

/// Writes [`fixture_files`] under `dir`.
pub fn emit_fixtures(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    for (rel, bytes) in fixture_files() {
        let path = dir.join(rel);
        write_file(&path, &bytes)?;
        written.push(path);
    }
    Ok(written)
}

fn cmd_fixtures(a: &FixturesArgs, sink: &mut Sink) -> Result<(), CliError> {
    let mut listing = String::new();
    for p in emit_fixtures(&a.dir)? {
        writeln!(listing, "{}", p.display()).unwrap();
    }
    sink.stdout
        .write_all(listing.as_bytes())
        .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
}

fn dispatch(cfg: &CliConfig, sink: &mut Sink) -> Result<(), CliError> {
    match &cfg.command {
        Command::Convert(a) => cmd_convert(a, sink),
        Command::Solve(a) => cmd_solve(a, sink),
        Command::Analyze(a) => cmd_analyze(a, sink),
        Command::Rationalize(a) => cmd_rationalize(a, sink),
        Command::Shape(a) => cmd_shape(a, sink),
        Command::Extract(a) => cmd_extract(a, sink),
        Command::Fixtures(a) => cmd_fixtures(a, sink),
    }
}

/// Parses `argv` (program name first) and runs the subcommand, writing to
/// the given streams.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cfg, &mut Sink { stdout, stderr: &mut *stderr }) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error[{}]: {e}", e.code());
            e.exit_code()
        }
    }
}

/// [`run_with`] on the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["storygame"];
        argv.extend_from_slice(args);
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&[]).0, 2);
        assert_eq!(run_capture(&["frobnicate"]).0, 2);
        assert_eq!(run_capture(&["solve"]).0, 2);
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("rationalize"));
    }

    #[test]
    fn domain_errors_exit_1() {
        let (code, _, err) = run_capture(&["solve", "/nonexistent/game.efg"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error[io]"));
    }

    #[test]
    fn fixtures_then_solve_and_rationalize() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        assert_eq!(run_capture(&["fixtures", "--fixtures-dir", d]).0, 0);
        let g1 = format!("{d}/game1.efg");
        let (code, out, _) = run_capture(&["solve", &g1, "--out", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let profile = v["profile"].as_array().unwrap();
        assert_eq!(profile[0]["actions"]["fake-death"], 1.0);
        assert_eq!(profile[1]["actions"]["live"], 1.0);
        assert!(v.get("wall_time_ms").is_none());

        let g2 = format!("{d}/game2.efg");
        let story = format!("{d}/actual_path.json");
        let (code, out, _) = run_capture(&["rationalize", &g2, "--story", &story]);
        assert_eq!(code, 0);
        assert!(out.starts_with("rationalized: true, path probability 0.0525"), "{out}");
    }

    #[test]
    fn unsupported_format_is_usage() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path().to_str().unwrap();
        run_capture(&["fixtures", "--fixtures-dir", d]);
        let (code, _, err) = run_capture(&["solve", &format!("{d}/game1.json"), "--format", "svg"]);
        assert_eq!(code, 2, "{err}");
    }
}
