//! Subcommands `synth`, `clean`, `characterize` and `simulate`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use evreplay_core::ingest::{CleaningReport, CleaningRules};
use evreplay_core::synthgen::{generate_user, write_header, GeneratorProfile};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{load_profile, Inputs, RunConfig};
use crate::csvio;
use crate::error::{CliError, Result};
use crate::manifest::OutputDir;
use crate::pipeline::{self, FileDiagnostic, OverlapEntry, SimSettings};

pub const OUTPUT_ENV: &str = "EVREPLAY_OUTPUT";
pub const TRIPS_FILE: &str = "trips.csv";
pub const CLEANED_FILE: &str = "cleaned.csv";
pub const REPORT_FILE: &str = "cleaning_report.json";

/// Users generated per parallel batch by `synth`.
const SYNTH_BATCH: usize = 256;

#[derive(Debug, Parser)]
#[command(name = "evreplay", version, about = "Replay recorded car trips against electric vehicles and charging policies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic trip log from a preset or profile file.
    Synth(SynthArgs),
    /// Sort, merge and filter a trip log; write the cleaned log and a report.
    Clean(CommonArgs),
    /// Per-user driving statistics and their distributions.
    Characterize(CharacterizeArgs),
    /// Replay every user under each vehicle and charging policy.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Trip log CSV (repeatable).
    #[arg(long)]
    pub input: Vec<PathBuf>,
    /// Output directory.
    #[arg(long, env = OUTPUT_ENV)]
    pub output: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Preset name (commuter, long-hauler, mixed-fleet, dirty-data) or a TOML profile.
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the profile's user count.
    #[arg(long)]
    pub users: Option<usize>,
    /// Override the profile's horizon in days.
    #[arg(long)]
    pub days: Option<u32>,
}

#[derive(Debug, Args)]
pub struct CharacterizeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Histogram bins per distribution.
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated scenario numbers, e.g. `1,3`.
    #[arg(long, value_delimiter = ',')]
    pub scenarios: Option<Vec<u32>>,
    /// Comma-separated vehicle names.
    #[arg(long, value_delimiter = ',')]
    pub vehicles: Option<Vec<String>>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// Also write per-trip SoC traces.
    #[arg(long)]
    pub trace: bool,
    /// Initial state of charge as a fraction of capacity.
    #[arg(long)]
    pub initial_soc: Option<f64>,
    /// Observation window in days for monthly normalization.
    #[arg(long)]
    pub observation_days: Option<f64>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if !self.input.is_empty() {
            cfg.input = Some(Inputs::Many(self.input.clone()));
        }
        if self.output.is_some() {
            cfg.output.clone_from(&self.output);
        }
        if self.jobs.is_some() {
            cfg.jobs = self.jobs;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn output_dir(cfg: &RunConfig) -> Result<PathBuf> {
    cfg.output
        .clone()
        .ok_or_else(|| CliError::usage(format!("no output directory given (use --output, {OUTPUT_ENV} or `output`)")))
}

fn snapshot<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("config serializes")
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(args) => cmd_synth(&args),
        Command::Clean(args) => cmd_clean(&args),
        Command::Characterize(args) => cmd_characterize(&args),
        Command::Simulate(args) => cmd_simulate(&args),
    }
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Serialize)]
struct SynthSnapshot<'a> {
    profile: &'a GeneratorProfile,
    output: &'a PathBuf,
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let mut cfg = args.common.resolve()?;
    if args.profile.is_some() {
        cfg.profile.clone_from(&args.profile);
    }
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    let mut profile = load_profile(cfg.profile.as_deref().unwrap_or("mixed-fleet"))?;
    if let Some(seed) = cfg.seed {
        profile.seed = seed;
    }
    if let Some(n) = args.users {
        profile.n_users = n;
    }
    if let Some(d) = args.days {
        profile.horizon_days = d;
    }
    profile.validate().map_err(|e| CliError::usage(e.to_string()))?;
    let out_path = output_dir(&cfg)?;

    let mut out = OutputDir::create(&out_path)?;
    let (mut trips, mut malformed) = (0u64, 0u64);
    let profile_ref = &profile;
    out.write(TRIPS_FILE, |buf| {
        let mut header = String::new();
        write_header(&mut header).expect("writing to a String cannot fail");
        buf.extend_from_slice(header.as_bytes());
        for start in (0..profile_ref.n_users).step_by(SYNTH_BATCH) {
            let end = (start + SYNTH_BATCH).min(profile_ref.n_users);
            let batch = pipeline::with_jobs(cfg.jobs, || {
                (start..end)
                    .into_par_iter()
                    .map(|i| {
                        let user = generate_user(profile_ref, i)?;
                        let mut rows = String::new();
                        user.write_rows(&mut rows).expect("writing to a String cannot fail");
                        Ok((rows, user.trips.len() as u64, user.malformed_rows.len() as u64))
                    })
                    .collect::<std::result::Result<Vec<_>, evreplay_core::synthgen::GeneratorError>>()
            })?
            .map_err(|e| CliError::usage(e.to_string()))?;
            for (rows, t, m) in batch {
                buf.extend_from_slice(rows.as_bytes());
                trips += t;
                malformed += m;
            }
        }
        Ok(())
    })?;
    let counts = BTreeMap::from([
        ("users", profile.n_users as u64),
        ("trip_rows", trips),
        ("malformed_rows", malformed),
    ]);
    let config = snapshot(&SynthSnapshot {
        profile: &profile,
        output: &out_path,
    });
    out.finish("synth", config, Vec::new(), counts)?;
    eprintln!("synth: {} users, {trips} trips -> {}", profile.n_users, out_path.join(TRIPS_FILE).display());
    Ok(())
}

#[derive(Serialize)]
struct ReportJson<'a> {
    #[serde(flatten)]
    counts: ReportCounts,
    diagnostics: &'a [FileDiagnostic],
    overlaps: &'a [OverlapEntry],
}

#[derive(Serialize)]
struct ReportCounts {
    input: u64,
    malformed: u64,
    overlapping: u64,
    short_parking_merges: u64,
    too_short: u64,
    too_long: u64,
    too_near: u64,
    too_far: u64,
    too_slow: u64,
    too_fast: u64,
    retained: u64,
}

impl From<CleaningReport> for ReportCounts {
    fn from(r: CleaningReport) -> Self {
        Self {
            input: r.input,
            malformed: r.malformed,
            overlapping: r.overlapping,
            short_parking_merges: r.short_parking_merges,
            too_short: r.too_short,
            too_long: r.too_long,
            too_near: r.too_near,
            too_far: r.too_far,
            too_slow: r.too_slow,
            too_fast: r.too_fast,
            retained: r.retained,
        }
    }
}

fn report_counts(report: &CleaningReport) -> BTreeMap<&'static str, u64> {
    BTreeMap::from([
        ("records", report.input),
        ("malformed_rows", report.malformed),
        ("rejected", report.rejected()),
        ("short_parking_merges", report.short_parking_merges),
        ("retained_trips", report.retained),
    ])
}

struct Prepared {
    input: pipeline::LoadedInput,
    fleet: pipeline::CleanedFleet,
}

fn load_and_clean(cfg: &RunConfig) -> Result<Prepared> {
    let mut input = pipeline::load_inputs(&cfg.inputs())?;
    let users = std::mem::take(&mut input.users);
    let malformed = input.diagnostics.len() as u64;
    let fleet = pipeline::with_jobs(cfg.jobs, || pipeline::clean_fleet(users, malformed, &CleaningRules::default()))?;
    Ok(Prepared { input, fleet })
}

pub fn cmd_clean(args: &CommonArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let out_path = output_dir(&cfg)?;
    let Prepared { input, fleet } = load_and_clean(&cfg)?;

    let mut out = OutputDir::create(&out_path)?;
    out.write(CLEANED_FILE, |buf| {
        let users = fleet.users.iter().map(|u| (u.user_id.as_str(), u.trips.as_slice()));
        Ok(csvio::write_trips(buf, users)?)
    })?;
    out.write_json(
        REPORT_FILE,
        &ReportJson {
            counts: fleet.report.into(),
            diagnostics: &input.diagnostics,
            overlaps: &fleet.overlaps(),
        },
    )?;
    let mut counts = report_counts(&fleet.report);
    let users_left = fleet.users.iter().filter(|u| !u.trips.is_empty()).count() as u64;
    counts.insert("users", fleet.users.len() as u64);
    counts.insert("users_retained", users_left);
    out.finish("clean", snapshot(&cfg), input.digests, counts)?;
    let r = fleet.report;
    eprintln!(
        "clean: {} records, {} malformed, {} retained -> {}",
        r.input,
        r.malformed,
        r.retained,
        out_path.join(CLEANED_FILE).display()
    );
    if users_left == 0 {
        return Err(CliError::Empty("no users with trips after cleaning".into()));
    }
    Ok(())
}

pub fn cmd_characterize(args: &CharacterizeArgs) -> Result<()> {
    let mut cfg = args.common.resolve()?;
    if args.bins.is_some() {
        cfg.bins = args.bins;
    }
    cfg.validate()?;
    let out_path = output_dir(&cfg)?;
    let Prepared { input, fleet } = load_and_clean(&cfg)?;
    let rows = pipeline::with_jobs(cfg.jobs, || pipeline::characterize_fleet(&fleet.users))?;
    if rows.is_empty() {
        return Err(CliError::Empty("no users".into()));
    }
    let summaries = pipeline::characterization_summaries(&rows, cfg.bins())?;

    let mut out = OutputDir::create(&out_path)?;
    out.write("characterization.csv", |buf| Ok(csvio::write_characterization(buf, &rows)?))?;
    let labelled: Vec<(Vec<String>, _)> = summaries.iter().map(|(m, s)| (vec![m.to_string()], s.clone())).collect();
    out.write("characterization_summary.csv", |buf| {
        Ok(csvio::write_summaries(buf, &["metric"], &labelled)?)
    })?;
    for (metric, summary) in &summaries {
        out.write(&format!("distributions/{metric}.csv"), |buf| Ok(csvio::write_histogram(buf, summary)?))?;
    }
    let mut counts = report_counts(&fleet.report);
    counts.insert("users", rows.len() as u64);
    out.finish("characterize", snapshot(&cfg), input.digests, counts)?;
    eprintln!("characterize: {} users -> {}", rows.len(), out_path.display());
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let mut cfg = args.common.resolve()?;
    if args.scenarios.is_some() {
        cfg.scenarios.clone_from(&args.scenarios);
    }
    if let Some(v) = &args.vehicles {
        cfg.vehicles = v.iter().map(|s| s.trim().to_string()).collect();
    }
    if args.bins.is_some() {
        cfg.bins = args.bins;
    }
    if args.initial_soc.is_some() {
        cfg.initial_soc = args.initial_soc;
    }
    if args.observation_days.is_some() {
        cfg.observation_days = args.observation_days;
    }
    cfg.trace |= args.trace;
    cfg.validate()?;
    // Everything that can be wrong with the configuration fails here,
    // before any input is read.
    let vehicles = cfg.resolve_vehicles()?;
    let policies = cfg.resolve_policies()?;
    let out_path = output_dir(&cfg)?;

    let Prepared { input, fleet } = load_and_clean(&cfg)?;
    let timelines = fleet.timelines();
    drop(fleet.users);
    if timelines.is_empty() {
        return Err(CliError::Empty("no users".into()));
    }
    let observation_days = cfg
        .observation_days
        .or_else(|| pipeline::observation_span_days(&timelines))
        .expect("non-empty timelines have a span");
    let settings = SimSettings {
        vehicles,
        policies,
        initial_soc: cfg.initial_soc(),
        observation_days,
        keep_traces: cfg.trace,
    };
    let outcome = pipeline::with_jobs(cfg.jobs, || pipeline::simulate_fleet(&timelines, &settings))?;
    for failure in &outcome.failures {
        eprintln!("warning: {failure}");
    }
    if outcome.rows.is_empty() {
        return Err(CliError::Empty("no users".into()));
    }
    let report = pipeline::summarize(&outcome.rows, &settings, cfg.bins())?;

    let mut out = OutputDir::create(&out_path)?;
    out.write("user_metrics.csv", |buf| Ok(csvio::write_user_metrics(buf, &outcome.rows)?))?;
    out.write("matrix.csv", |buf| Ok(csvio::write_matrix(buf, &report.matrix)?))?;
    let labelled: Vec<(Vec<String>, _)> = report
        .distributions
        .iter()
        .map(|d| (vec![d.metric.to_string(), d.policy.clone(), d.vehicle.clone()], d.summary.clone()))
        .collect();
    out.write("distribution_summary.csv", |buf| {
        Ok(csvio::write_summaries(buf, &["metric", "policy", "vehicle"], &labelled)?)
    })?;
    for d in &report.distributions {
        let name = format!(
            "distributions/{}__{}__{}.csv",
            d.metric,
            pipeline::slug(&d.policy),
            pipeline::slug(&d.vehicle)
        );
        out.write(&name, |buf| Ok(csvio::write_histogram(buf, &d.summary)?))?;
    }
    if cfg.trace {
        for policy in &settings.policies {
            for vehicle in &settings.vehicles {
                let name = format!("trace/{}__{}.csv", pipeline::slug(&policy.name), pipeline::slug(&vehicle.name));
                let results = outcome
                    .traces
                    .iter()
                    .filter(|r| r.policy == policy.name && r.vehicle == vehicle.name);
                out.write(&name, |buf| Ok(csvio::write_trace(buf, results)?))?;
            }
        }
    }
    let mut counts = report_counts(&fleet.report);
    counts.insert("users", timelines.len() as u64);
    counts.insert("simulations", outcome.rows.len() as u64);
    counts.insert("failed_simulations", outcome.failures.len() as u64);
    let mut snap = snapshot(&cfg);
    snap["effective_observation_days"] = observation_days.into();
    out.finish("simulate", snap, input.digests, counts)?;
    eprintln!(
        "simulate: {} users x {} vehicles x {} policies -> {}",
        timelines.len(),
        settings.vehicles.len(),
        settings.policies.len(),
        out_path.display()
    );
    Ok(())
}
