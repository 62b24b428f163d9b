//! The `bsht` command line: `reduce`, `build`, `graph`, `verify` and
//! `demands gen`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 precondition or usage
//! error, 3 cap exhaustion.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::amalgam_words::{reduce_amalgam, AmalgamWord};
use crate::base_groups::{Presentation, Side};
use crate::hnn_words::{reduce, HnnWord};
use crate::ht_builder::{
    parse_demands, run_rounds, verify_certificates_text, AmalgamEngine, BuildError, Caps, Engine, HnnEngine, RoundsConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// Largest accepted window radius.
pub const MAX_RADIUS: usize = 16;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Verify(String),
    #[error("{0}")]
    Cap(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify(_) => EXIT_VERIFY,
            CliError::Cap(_) => EXIT_CAP,
            CliError::Usage(_) | CliError::Precondition(_) | CliError::Io { .. } => EXIT_PRECONDITION,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

#[derive(Debug, Parser)]
#[command(name = "bsht", version, about = "Normal forms, pre-actions and highly transitive actions of HNN extensions and amalgams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the normal form of a word.
    Reduce {
        #[command(flatten)]
        group: GroupArgs,
        /// HNN: `t`, `T`, `h<k>`. Amalgam: `<side>:<k>`, e.g. `1:1 2:2`.
        word: String,
    },
    /// Run the builder and write transcript, certificates, pre-action and DOT window.
    Build(BuildArgs),
    /// Print the DOT window of the Bass-Serre graph of a pre-action file.
    Graph {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        radius: usize,
    },
    /// Re-verify a certificates file against a pre-action file.
    Verify { preaction: PathBuf, certificates: PathBuf },
    /// Demand files.
    Demands {
        #[command(subcommand)]
        command: DemandsCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum DemandsCommand {
    /// Print a seeded random demand file.
    Gen(GenArgs),
}

/// The presentation: `--bs M N`, `--amalgam P Q [--over S]`, or a config
/// string such as `--presentation "bs m=2 n=3"`.
#[derive(Debug, Clone, Args)]
pub struct GroupArgs {
    #[arg(long, num_args = 2, value_names = ["M", "N"], allow_negative_numbers = true)]
    pub bs: Option<Vec<i64>>,
    #[arg(long, num_args = 2, value_names = ["P", "Q"], conflicts_with = "bs")]
    pub amalgam: Option<Vec<u64>>,
    #[arg(long, requires = "amalgam")]
    pub over: Option<u64>,
    #[arg(long, conflicts_with_all = ["bs", "amalgam"])]
    pub presentation: Option<String>,
}

impl GroupArgs {
    pub fn config(&self) -> Result<String, CliError> {
        match (&self.bs, &self.amalgam, &self.presentation) {
            (Some(v), None, None) => Ok(format!("bs m={} n={}", v[0], v[1])),
            (None, Some(v), None) => Ok(match self.over {
                Some(s) => format!("amalgam zmod {} {} over {s}", v[0], v[1]),
                None => format!("amalgam zmod {} {}", v[0], v[1]),
            }),
            (None, None, Some(p)) => Ok(p.clone()),
            _ => Err(CliError::Usage("give exactly one of --bs, --amalgam, --presentation".into())),
        }
    }

    pub fn presentation(&self) -> Result<Presentation, CliError> {
        let cfg = self.config()?;
        Presentation::parse(&cfg).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Demand file; one `map (o,e)... -> (o,e)...` or `moves "word"` per line.
    #[arg(long, conflicts_with = "random_demands")]
    pub demands: Option<PathBuf>,
    /// Generate this many random transitivity demands instead of reading a file.
    #[arg(long)]
    pub random_demands: Option<usize>,
    #[arg(long, default_value_t = 4)]
    pub max_k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to the number of demands.
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long, default_value_t = Caps::default().separation)]
    pub separation_cap: usize,
    #[arg(long, default_value_t = Caps::default().extension)]
    pub extension_cap: usize,
    #[arg(long, default_value_t = Caps::default().witness)]
    pub witness_cap: usize,
    /// Each round records a point moved by this many enumerated elements.
    #[arg(long, default_value_t = 10)]
    pub faithful: usize,
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value_t = 8)]
    pub count: usize,
    #[arg(long, default_value_t = 4)]
    pub max_k: usize,
    /// Points are drawn from orbits `0..orbits`.
    #[arg(long, default_value_t = 3)]
    pub orbits: u64,
    /// HNN points have elements in `-spread..=spread`.
    #[arg(long, default_value_t = 6)]
    pub spread: i64,
    /// Also emit this many `moves` demands for short nontrivial elements.
    #[arg(long, default_value_t = 0)]
    pub moves: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// A validated build configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub presentation: String,
    pub demands: DemandSource,
    pub rounds: Option<usize>,
    pub caps: Caps,
    pub faithful: usize,
    pub radius: usize,
    pub out_dir: PathBuf,
    /// Used only when generating demands.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DemandSource {
    File(PathBuf),
    Random { count: usize, max_k: usize },
}

impl RunConfig {
    pub fn from_args(a: &BuildArgs) -> Result<RunConfig, CliError> {
        let demands = match (&a.demands, a.random_demands) {
            (Some(p), None) => DemandSource::File(p.clone()),
            (None, Some(count)) => DemandSource::Random { count, max_k: a.max_k },
            _ => return Err(CliError::Usage("give one of --demands FILE or --random-demands N".into())),
        };
        let cfg = RunConfig {
            presentation: a.group.config()?,
            demands,
            rounds: a.rounds,
            caps: Caps { separation: a.separation_cap, extension: a.extension_cap, witness: a.witness_cap },
            faithful: a.faithful,
            radius: a.radius,
            out_dir: a.out.clone(),
            seed: a.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let c = self.caps;
        if c.separation == 0 || c.extension == 0 || c.witness == 0 {
            return Err(CliError::Usage("caps must be positive".into()));
        }
        if self.radius > MAX_RADIUS {
            return Err(CliError::Usage(format!("radius {} exceeds {MAX_RADIUS}", self.radius)));
        }
        Ok(())
    }
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PRECONDITION } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32, CliError> {
    let text = match cmd {
        Command::Reduce { group, word } => cmd_reduce(&group.presentation()?, word)? + "\n",
        Command::Build(args) => return cmd_build(&RunConfig::from_args(args)?, out),
        Command::Graph { file, radius } => {
            if *radius > MAX_RADIUS {
                return Err(CliError::Usage(format!("radius {radius} exceeds {MAX_RADIUS}")));
            }
            cmd_graph(&read(file)?, *radius)?
        }
        Command::Verify { preaction, certificates } => return cmd_verify(&read(preaction)?, &read(certificates)?, out),
        Command::Demands { command: DemandsCommand::Gen(g) } => generate_demands(
            &g.group.presentation()?,
            &GenConfig { count: g.count, max_k: g.max_k, orbits: g.orbits, spread: g.spread, moves: g.moves, seed: g.seed },
        )?,
    };
    out.write_all(text.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    Ok(EXIT_OK)
}

/// The normal form of `word`.
pub fn cmd_reduce(p: &Presentation, word: &str) -> Result<String, CliError> {
    let bad = |e: crate::hnn_words::WordError| CliError::Usage(e.to_string());
    Ok(match p {
        Presentation::Hnn(d) => reduce(&HnnWord::parse(word, d).map_err(bad)?, d).to_string(),
        Presentation::Amalgam(d) => reduce_amalgam(&AmalgamWord::parse(word, d).map_err(bad)?, d).to_string(),
    })
}

/// The presentation named by the `preaction <config>` header of a pre-action file.
pub fn preaction_presentation(text: &str) -> Result<Presentation, CliError> {
    let header = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
    let cfg = header
        .strip_prefix("preaction ")
        .ok_or_else(|| CliError::Usage("expected a `preaction <presentation>` header".into()))?;
    Presentation::parse(cfg).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn cmd_graph(preaction: &str, radius: usize) -> Result<String, CliError> {
    fn go<E: Engine>(text: &str, radius: usize) -> Result<String, CliError> {
        Ok(E::dot(&E::parse_core(text).map_err(CliError::Usage)?, radius))
    }
    match preaction_presentation(preaction)? {
        Presentation::Hnn(_) => go::<HnnEngine>(preaction, radius),
        Presentation::Amalgam(_) => go::<AmalgamEngine>(preaction, radius),
    }
}

pub fn cmd_verify(preaction: &str, certificates: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    fn go<E: Engine>(preaction: &str, certificates: &str) -> Result<Vec<(String, bool)>, CliError> {
        let core = E::parse_core(preaction).map_err(CliError::Usage)?;
        verify_certificates_text::<E>(&core, certificates).map_err(CliError::Verify)
    }
    let results = match preaction_presentation(preaction)? {
        Presentation::Hnn(_) => go::<HnnEngine>(preaction, certificates)?,
        Presentation::Amalgam(_) => go::<AmalgamEngine>(preaction, certificates)?,
    };
    let failed: Vec<&str> = results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    let mut report = format!("{} certificates, {} failed\n", results.len(), failed.len());
    for f in &failed {
        report.push_str(&format!("FAIL {f}\n"));
    }
    if !failed.is_empty() {
        return Err(CliError::Verify(report.trim_end().to_string()));
    }
    out.write_all(report.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    Ok(EXIT_OK)
}

/// Artifacts of a build, as written to the output directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildArtifacts {
    pub transcript: String,
    pub certificates: String,
    pub preaction: String,
    pub dot: String,
    pub exit_code: i32,
    pub summary: String,
}

/// Run the builder without touching the filesystem, except to read a demand file.
pub fn build_artifacts(cfg: &RunConfig) -> Result<BuildArtifacts, CliError> {
    cfg.validate()?;
    let p = Presentation::parse(&cfg.presentation).map_err(|e| CliError::Usage(e.to_string()))?;
    let demands = match &cfg.demands {
        DemandSource::File(path) => read(path)?,
        DemandSource::Random { count, max_k } => generate_demands(
            &p,
            &GenConfig { count: *count, max_k: *max_k, seed: cfg.seed, ..GenConfig::default() },
        )?,
    };
    match &p {
        Presentation::Hnn(d) => build_with::<HnnEngine>(d, &demands, cfg),
        Presentation::Amalgam(d) => build_with::<AmalgamEngine>(d, &demands, cfg),
    }
}

fn build_with<E: Engine>(data: &E::Data, demand_text: &str, cfg: &RunConfig) -> Result<BuildArtifacts, CliError> {
    let report = E::preconditions(data);
    if !report.accepted() {
        return Err(CliError::Precondition(format!("{}: {report}", E::config(data))));
    }
    let demands = parse_demands::<E>(data, demand_text).map_err(CliError::Usage)?;
    let rounds = cfg.rounds.unwrap_or(demands.len());
    let rc = RoundsConfig { rounds, faithful: cfg.faithful, caps: cfg.caps };
    let outcome = match run_rounds::<E>(data, &demands, &rc) {
        Ok(o) => o,
        Err(BuildError::Precondition(r)) => return Err(CliError::Precondition(r.to_string())),
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    let scheduled = demands.len().min(rounds);
    let discharged = outcome.state.discharged;
    let verified = outcome.all_verify();
    let exit_code = match &outcome.error {
        Some(BuildError::CapExceeded { .. }) => EXIT_CAP,
        Some(_) => EXIT_VERIFY,
        None if discharged == demands.len() && verified => EXIT_OK,
        None => EXIT_VERIFY,
    };
    let mut summary = format!(
        "{}: {discharged}/{} demands discharged ({scheduled} scheduled), {} certificates {}",
        E::config(data),
        demands.len(),
        outcome.state.certificates.len(),
        if verified { "verified" } else { "FAILED verification" },
    );
    if let Some(e) = &outcome.error {
        summary.push_str(&format!("; stopped: {e}"));
    }
    Ok(BuildArtifacts {
        transcript: outcome.transcript_text(),
        certificates: outcome.certificates_text(),
        preaction: E::serialize(&outcome.state.core),
        dot: E::dot(&outcome.state.core, cfg.radius),
        exit_code,
        summary,
    })
}

pub fn cmd_build(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let a = build_artifacts(cfg)?;
    let dir = &cfg.out_dir;
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
    write_file(&dir.join("transcript.txt"), &a.transcript)?;
    write_file(&dir.join("certificates.txt"), &a.certificates)?;
    write_file(&dir.join("preaction.txt"), &a.preaction)?;
    write_file(&dir.join("window.dot"), &a.dot)?;
    let line = a.summary + "\n";
    match a.exit_code {
        EXIT_OK => {
            out.write_all(line.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
            Ok(EXIT_OK)
        }
        EXIT_CAP => Err(CliError::Cap(line.trim_end().to_string())),
        _ => Err(CliError::Verify(line.trim_end().to_string())),
    }
}

/// Parameters of [`generate_demands`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub count: usize,
    pub max_k: usize,
    pub orbits: u64,
    pub spread: i64,
    pub moves: usize,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { count: 8, max_k: 4, orbits: 3, spread: 6, moves: 0, seed: 0 }
    }
}

/// A seeded demand file: `count` transitivity demands with `k` cycling
/// through `1..=max_k`, each over `2k` distinct random points, then
/// `moves` faithfulness demands.
pub fn generate_demands(p: &Presentation, g: &GenConfig) -> Result<String, CliError> {
    if g.max_k == 0 || g.orbits == 0 {
        return Err(CliError::Usage("--max-k and --orbits must be positive".into()));
    }
    // every candidate point as (orbit, element)
    let elements: Vec<i64> = match p {
        Presentation::Hnn(_) => (-g.spread..=g.spread).collect(),
        Presentation::Amalgam(d) => match d.factor(Side::One).order() {
            Some(n) => (0..n as i64).collect(),
            None => (-g.spread..=g.spread).collect(),
        },
    };
    let pool: Vec<(u64, i64)> = (0..g.orbits).flat_map(|o| elements.iter().map(move |&e| (o, e))).collect();
    if pool.len() < 2 * g.max_k {
        return Err(CliError::Usage(format!("only {} points available for k = {}", pool.len(), g.max_k)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let fmt_tuple = |t: &[&(u64, i64)]| t.iter().map(|(o, e)| format!("({o},{e})")).collect::<Vec<_>>().join(" ");
    let mut s = format!("# {} seed={}\n", p.config(), g.seed);
    for i in 0..g.count {
        let k = i % g.max_k + 1;
        let pts: Vec<_> = pool.choose_multiple(&mut rng, 2 * k).collect();
        s.push_str(&format!("map {} -> {}\n", fmt_tuple(&pts[..k]), fmt_tuple(&pts[k..])));
    }
    if g.moves > 0 {
        let words: Vec<String> = match p {
            Presentation::Hnn(d) => HnnEngine::enumerate(d, 4 * g.moves).iter().map(|w| w.to_string()).collect(),
            Presentation::Amalgam(d) => AmalgamEngine::enumerate(d, 4 * g.moves).iter().map(|w| w.to_string()).collect(),
        };
        for _ in 0..g.moves {
            s.push_str(&format!("moves \"{}\"\n", words[rng.gen_range(0..words.len())]));
        }
    }
    Ok(s)
}
