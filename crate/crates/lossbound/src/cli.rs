//! Command-line front end: configure a family, learner, and opponent from
//! a JSON config file and/or flags (flags win), then solve, simulate,
//! verify, or sweep.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 configuration or
//! I/O error, 3 instance too large for exact verification.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{
    parse_config, parse_learner, parse_opponent, CheckConfig, ConfigError, ExperimentConfig,
    ParamBag,
};
use crate::families::{to_stage_game, FamilyShape};
use crate::learners::LearnerSpec;
use crate::opponents::{Caps, OpponentError, OpponentSpec};
use crate::sim::{write_traces_csv, MonteCarloEstimate, Simulation, Trace};
use crate::stage_game::solve_maximin;
use crate::verify::{
    check_approximate, check_expected, check_guaranteed, expected_bound, guaranteed_bound,
    lemma_constants, lemma_sweep, reference_learner, sweep_instances, BoundReport,
    LemmaSweepReport, VerifyError, SWEEP_MAX_GET_CLOSE_N, SWEEP_MAX_MP_TOTAL,
    SWEEP_MAX_RPS_TOTAL, SWEEP_MAX_TWO_TARGETS_N,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "lossbound",
    about = "Simulate and verify loss-bounded learning in repeated zero-sum games",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the stage game's value and both maximin strategies.
    Solve(CommonArgs),
    /// Play seeded episodes; write a trace CSV and a JSON metadata sidecar.
    Simulate(CommonArgs),
    /// Run verification checks against claimed loss bounds.
    Verify(CommonArgs),
    /// Verify a family across all sizes within the configured caps.
    Sweep(CommonArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// JSON experiment config; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Family name: get_close | rps_duds | random_orientation_rps_duds |
    /// two_targets | mp_duds.
    #[arg(long)]
    pub family: Option<String>,
    /// Family or learner parameter, repeatable (e.g. --param n=16 --param
    /// k=11, --param f=2,3,1, --param r=2).
    #[arg(long = "param")]
    pub params: Vec<String>,
    /// Learner name; prefix with wrap: to freeze its strategy once learned.
    #[arg(long)]
    pub learner: Option<String>,
    /// Opponent name, or scripted:<path> for a fixed action list.
    #[arg(long)]
    pub opponent: Option<String>,
    /// Rounds per episode.
    #[arg(long)]
    pub rounds: Option<u32>,
    /// Episodes to simulate.
    #[arg(long)]
    pub episodes: Option<u32>,
    /// Master seed; per-episode seeds are derived from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path (trace CSV for simulate, JSON records for verify/sweep).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Check to run: guaranteed | expected | approximate | lemma.
    #[arg(long)]
    pub check: Option<String>,
    /// Claimed loss bound for --check (defaults to the family's theorem
    /// bound).
    #[arg(long)]
    pub bound: Option<f64>,
    /// Precision for --check approximate.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

/// Merge a config file (if any) with flag overrides into one experiment.
fn assemble(args: &CommonArgs) -> Result<ExperimentConfig, ConfigError> {
    let bag = ParamBag::parse(&args.params)?;
    let mut config = match (&args.config, &args.family) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| ConfigError::Invalid {
                field: "config".into(),
                reason: format!("cannot read {}: {e}", path.display()),
            })?;
            parse_config(&text)?
        }
        (None, Some(name)) => ExperimentConfig {
            family: bag.family(name)?,
            learner: None,
            opponent: None,
            rounds: crate::config::DEFAULT_ROUNDS,
            episodes: crate::config::DEFAULT_EPISODES,
            seed: 0,
            out: None,
            checks: Vec::new(),
        },
        (None, None) => return Err(ConfigError::Missing("--config or --family")),
    };
    if let Some(name) = &args.family {
        if args.config.is_some() {
            config.family = bag.family(name)?;
        }
    } else {
        bag.apply_to_family(&mut config.family)?;
    }
    if let Some(name) = &args.learner {
        config.learner = Some(parse_learner(name, &bag)?);
    }
    if let Some(name) = &args.opponent {
        config.opponent = Some(parse_opponent(name)?);
    }
    if let Some(v) = args.rounds {
        config.rounds = v;
    }
    if let Some(v) = args.episodes {
        config.episodes = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if args.out.is_some() {
        config.out = args.out.clone();
    }
    if let Some(kind) = &args.check {
        config.checks = vec![check_from_flags(kind, args, &bag)?];
    }
    config.family.validate_shape()?;
    Ok(config)
}

fn check_from_flags(
    kind: &str,
    args: &CommonArgs,
    bag: &ParamBag,
) -> Result<CheckConfig, ConfigError> {
    let check = match kind {
        "guaranteed" => CheckConfig::Guaranteed { bound: args.bound },
        "expected" => CheckConfig::Expected {
            bound: args.bound,
            horizons: None,
        },
        "approximate" => {
            let budget = bag
                .budget()?
                .ok_or(ConfigError::Missing("--param r=<loss budget>"))?;
            CheckConfig::Approximate {
                bound: args.bound.unwrap_or(f64::from(budget)),
                epsilon: args.epsilon.ok_or(ConfigError::Missing("--epsilon"))?,
                horizons: None,
            }
        }
        "lemma" => CheckConfig::Lemma { constants: None },
        other => {
            return Err(ConfigError::UnknownName {
                what: "check",
                got: other.to_string(),
                options: "guaranteed, expected, approximate, lemma",
            })
        }
    };
    Ok(check)
}

/// One verification record: either a bound check or a lemma sweep.
#[derive(Debug, Serialize)]
#[serde(untagged)]
enum CheckRecord {
    Bound(BoundReport),
    Lemma(LemmaSweepReport),
}

impl CheckRecord {
    fn pass(&self) -> bool {
        match self {
            CheckRecord::Bound(r) => r.pass,
            CheckRecord::Lemma(r) => r.pass,
        }
    }

    fn summary_line(&self) -> String {
        match self {
            CheckRecord::Bound(r) => format!(
                "{:<12} {:<46} learner={:<28} claimed={:<10} measured={:<12.6} {}",
                format!("{:?}", r.check).to_lowercase(),
                r.family,
                r.learner,
                r.claimed,
                r.measured,
                if r.pass { "PASS" } else { "FAIL" }
            ),
            CheckRecord::Lemma(r) => format!(
                "{:<12} {:<46} learner={:<28} implied={:<10} worst_ratio={:<12} {}",
                "lemma",
                r.family,
                r.learner,
                r.implied_bound,
                r.worst_ratio
                    .map_or_else(|| "-".into(), |v| format!("{v:.6}")),
                if r.pass { "PASS" } else { "FAIL" }
            ),
        }
    }
}

fn default_horizons(kind: &CheckConfig) -> Vec<u32> {
    match kind {
        CheckConfig::Approximate { .. } => (1..=40).collect(),
        _ => (1..=12).collect(),
    }
}

/// Run every configured check for one family shape.
fn run_checks(
    config: &ExperimentConfig,
    checks: &[CheckConfig],
    caps: &Caps,
) -> Result<Vec<CheckRecord>, CliError> {
    let shape = config.family.shape();
    let instances = if config.family.is_concrete() {
        vec![config.family.instance()?]
    } else {
        sweep_instances(&shape)?
    };
    let learner = config
        .learner
        .clone()
        .unwrap_or_else(|| reference_learner(&shape));
    let mut records = Vec::new();
    for check in checks {
        let record = match check {
            CheckConfig::Guaranteed { bound } => {
                let bound = bound.or_else(|| guaranteed_bound(&shape)).ok_or(
                    ConfigError::Missing("--bound (no guaranteed bound known for this family)"),
                )?;
                CheckRecord::Bound(check_guaranteed(&instances, &learner, bound, caps)?)
            }
            CheckConfig::Expected { bound, horizons } => {
                let bound = bound.or_else(|| expected_bound(&shape)).ok_or(
                    ConfigError::Missing("--bound (no expected bound known for this family)"),
                )?;
                let horizons = horizons.clone().unwrap_or_else(|| default_horizons(check));
                CheckRecord::Bound(check_expected(&instances, &learner, bound, &horizons, caps)?)
            }
            CheckConfig::Approximate { bound, epsilon, horizons } => {
                let horizons = horizons.clone().unwrap_or_else(|| default_horizons(check));
                CheckRecord::Bound(check_approximate(
                    &instances, &learner, *bound, *epsilon, &horizons, caps,
                )?)
            }
            CheckConfig::Lemma { constants } => {
                let constants = constants.clone().or_else(|| lemma_constants(&shape)).ok_or(
                    ConfigError::Missing("constants (no lemma constants known for this family)"),
                )?;
                CheckRecord::Lemma(lemma_sweep(&instances, &learner, &constants, caps)?)
            }
        };
        records.push(record);
    }
    Ok(records)
}

#[derive(Debug)]
enum CliError {
    Config(ConfigError),
    Verify(VerifyError),
    Io(std::io::Error),
    Other(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "config error: {e}"),
            CliError::Verify(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Other(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Other(_) => EXIT_CONFIG,
            CliError::Verify(e) if e.is_cap() => EXIT_CAP,
            CliError::Verify(VerifyError::Opponent(OpponentError::CapExceeded { .. })) => EXIT_CAP,
            CliError::Verify(_) => EXIT_CONFIG,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        CliError::Verify(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Entry point: returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Solve(args) => solve(args),
        Command::Simulate(args) => simulate(args),
        Command::Verify(args) => verify(args),
        Command::Sweep(args) => sweep(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn solve(args: &CommonArgs) -> Result<i32, CliError> {
    let config = assemble(args)?;
    let params = config.family.instance()?;
    let game = to_stage_game(&params).map_err(|e| CliError::Other(e.to_string()))?;
    let result = solve_maximin(&game).map_err(|e| CliError::Other(e.to_string()))?;
    println!("family {params}");
    println!("value {}", result.value);
    let show = |name: &str, probs: &[f64]| {
        let entries: Vec<String> = probs
            .iter()
            .enumerate()
            .map(|(i, p)| format!("{}:{}", i + 1, p))
            .collect();
        println!("{name} {}", entries.join(" "));
    };
    show("strategy1", result.strategy1.probs());
    show("strategy2", result.strategy2.probs());
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct SimulateSidecar<'a> {
    family: &'a crate::families::FamilyParams,
    learner: &'a LearnerSpec,
    opponent: &'a OpponentSpec,
    rounds: u32,
    episodes: u32,
    seed: u64,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    estimate: Option<MonteCarloEstimate>,
}

fn simulate(args: &CommonArgs) -> Result<i32, CliError> {
    let config = assemble(args)?;
    let params = config.family.instance()?;
    let shape = FamilyShape::of(&params);
    let learner = config
        .learner
        .clone()
        .unwrap_or_else(|| reference_learner(&shape));
    let opponent = config.opponent.clone().unwrap_or(OpponentSpec::WorstCaseDp);
    let caps = Caps::default();
    let sim = Simulation::new(&params, &learner, &opponent, config.rounds, &caps)
        .map_err(|e| CliError::Other(e.to_string()))?;

    let mut traces: Vec<Trace> = Vec::with_capacity(config.episodes as usize);
    for episode in 0..u64::from(config.episodes) {
        let seed = crate::sim::episode_seed(config.seed, episode);
        traces.push(
            sim.run_episode(seed)
                .map_err(|e| CliError::Other(e.to_string()))?,
        );
    }
    let estimate = if config.episodes >= 2 {
        Some(
            sim.monte_carlo(config.episodes, config.seed)
                .map_err(|e| CliError::Other(e.to_string()))?,
        )
    } else {
        None
    };

    match &config.out {
        Some(path) => {
            let mut file = fs::File::create(path)?;
            write_traces_csv(&traces, &mut file)?;
            let sidecar = SimulateSidecar {
                family: &params,
                learner: &learner,
                opponent: &opponent,
                rounds: config.rounds,
                episodes: config.episodes,
                seed: config.seed,
                value: sim.value(),
                estimate,
            };
            let meta_path = sidecar_path(path);
            fs::write(&meta_path, serde_json::to_string_pretty(&sidecar).unwrap())?;
            eprintln!(
                "wrote {} episodes x {} rounds to {} (metadata: {})",
                config.episodes,
                config.rounds,
                path.display(),
                meta_path.display()
            );
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_traces_csv(&traces, &mut lock)?;
            lock.flush()?;
            if let Some(est) = &estimate {
                eprintln!(
                    "mean cumulative loss {} (stderr {}, {} episodes)",
                    est.mean, est.std_error, est.episodes
                );
            }
        }
    }
    Ok(EXIT_OK)
}

fn sidecar_path(path: &std::path::Path) -> PathBuf {
    let mut name = path.as_os_str().to_os_string();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn emit_records(records: &[CheckRecord], out: Option<&PathBuf>) -> Result<(), CliError> {
    for record in records {
        println!("{}", record.summary_line());
    }
    if let Some(path) = out {
        let mut file = fs::File::create(path)?;
        for record in records {
            writeln!(file, "{}", serde_json::to_string(record).unwrap())?;
        }
    }
    Ok(())
}

fn verify(args: &CommonArgs) -> Result<i32, CliError> {
    let config = assemble(args)?;
    if config.checks.is_empty() {
        return Err(CliError::Config(ConfigError::Missing(
            "--check or a checks list in the config file",
        )));
    }
    let caps = Caps::default();
    let records = run_checks(&config, &config.checks.clone(), &caps)?;
    emit_records(&records, config.out.as_ref())?;
    if records.iter().all(CheckRecord::pass) {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_CHECK_FAILED)
    }
}

/// Default checks per family: guaranteed bounds where one exists, expected
/// bound plus ratio conditions otherwise.
fn default_checks(shape: &FamilyShape) -> Vec<CheckConfig> {
    if guaranteed_bound(shape).is_some() {
        vec![CheckConfig::Guaranteed { bound: None }]
    } else {
        vec![
            CheckConfig::Expected { bound: None, horizons: None },
            CheckConfig::Lemma { constants: None },
        ]
    }
}

fn sweep(args: &CommonArgs) -> Result<i32, CliError> {
    let config = assemble(args)?;
    let shapes: Vec<FamilyShape> = match config.family.shape() {
        FamilyShape::GetClose { .. } => (2..=SWEEP_MAX_GET_CLOSE_N)
            .map(|n| FamilyShape::GetClose { n })
            .collect(),
        FamilyShape::RpsDuds { .. } => (3..=SWEEP_MAX_RPS_TOTAL)
            .flat_map(|m| {
                (0..=SWEEP_MAX_RPS_TOTAL - m).map(move |n| FamilyShape::RpsDuds { m, n })
            })
            .collect(),
        FamilyShape::RandomOrientationRpsDuds { .. } => (3..=SWEEP_MAX_RPS_TOTAL)
            .flat_map(|m| {
                (0..=SWEEP_MAX_RPS_TOTAL - m)
                    .map(move |n| FamilyShape::RandomOrientationRpsDuds { m, n })
            })
            .collect(),
        FamilyShape::MpDuds { .. } => (1..=SWEEP_MAX_MP_TOTAL)
            .flat_map(|m| {
                (0..=SWEEP_MAX_MP_TOTAL - m).map(move |n| FamilyShape::MpDuds { m, n })
            })
            .collect(),
        FamilyShape::TwoTargets { p1, p2, r1, r2, .. } => (2..=SWEEP_MAX_TWO_TARGETS_N)
            .map(|n| FamilyShape::TwoTargets { n, p1, p2, r1, r2 })
            .collect(),
    };
    let caps = Caps::default();
    let mut all = Vec::new();
    for shape in shapes {
        let family = shape_to_config(&shape);
        let mut shape_config = config.clone();
        shape_config.family = family;
        shape_config.learner = config.learner.clone();
        let checks = if config.checks.is_empty() {
            default_checks(&shape)
        } else {
            config.checks.clone()
        };
        let records = run_checks(&shape_config, &checks, &caps)?;
        all.extend(records);
    }
    emit_records(&all, config.out.as_ref())?;
    if all.iter().all(CheckRecord::pass) {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_CHECK_FAILED)
    }
}

fn shape_to_config(shape: &FamilyShape) -> crate::config::FamilyConfig {
    use crate::config::FamilyConfig;
    match *shape {
        FamilyShape::GetClose { n } => FamilyConfig::GetClose { n, k: None },
        FamilyShape::RpsDuds { m, n } => FamilyConfig::RpsDuds { m, n, f: None },
        FamilyShape::RandomOrientationRpsDuds { m, n } => {
            FamilyConfig::RandomOrientationRpsDuds { m, n, f: None }
        }
        FamilyShape::TwoTargets { n, p1, p2, r1, r2 } => FamilyConfig::TwoTargets {
            n,
            p1,
            p2,
            r1,
            r2,
            k1: None,
            k2: None,
        },
        FamilyShape::MpDuds { m, n } => FamilyConfig::MpDuds { m, n, duds: None },
    }
}
