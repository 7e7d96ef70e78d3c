//! Fleet-level stages: load, clean, characterize, simulate, summarize.
//! Per-user work fans out over rayon; results keep input order.

use std::path::{Path, PathBuf};

use evreplay_core::charging::ChargingPolicy;
use evreplay_core::energy::VehicleSpec;
use evreplay_core::ingest::{clean_user, CleanedUser, CleaningReport, CleaningRules, Trip};
use evreplay_core::metrics::{
    aggregate, characterize_user, scenario_vehicle_matrix, user_metrics, DistributionSummary, MatrixCell,
    UserCharacterization, UserMetrics, UserMetricsRow,
};
use evreplay_core::sim::{simulate_user, SimulationResult, UserTimeline};
use rayon::prelude::*;
use serde::Serialize;

use crate::csvio::{group_by_user, parse_trip_log, ParseError};
use crate::error::{CliError, Result};
use crate::manifest::{sha256_hex, FileDigest};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDiagnostic {
    pub file: String,
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct LoadedInput {
    pub users: Vec<(String, Vec<Trip>)>,
    pub records: u64,
    pub diagnostics: Vec<FileDiagnostic>,
    pub digests: Vec<FileDigest>,
}

/// Reads and parses every input file. Users appearing in several files are
/// merged, keeping first-appearance order.
pub fn load_inputs(paths: &[PathBuf]) -> Result<LoadedInput> {
    if paths.is_empty() {
        return Err(CliError::usage("no input file given (use --input or `input` in the config)"));
    }
    for path in paths {
        if !path.is_file() {
            return Err(CliError::usage(format!("input file {} not found", path.display())));
        }
    }
    let mut records = Vec::new();
    let mut out = LoadedInput::default();
    for path in paths {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        out.digests.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
            bytes: bytes.len() as u64,
        });
        let log = parse_trip_log(bytes.as_slice()).map_err(|e| match e {
            ParseError::Header { .. } => CliError::usage(format!("{}: {e}", path.display())),
            ParseError::Csv(e) => CliError::Io {
                context: path.display().to_string(),
                source: e.into(),
            },
        })?;
        out.diagnostics.extend(log.diagnostics.into_iter().map(|d| FileDiagnostic {
            file: path.display().to_string(),
            line: d.line,
            message: d.message,
        }));
        records.extend(log.records);
    }
    out.records = records.len() as u64;
    out.users = group_by_user(records);
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct OverlapEntry {
    pub user_id: String,
    pub kept_start: String,
    pub dropped_start: String,
}

#[derive(Debug)]
pub struct CleanedFleet {
    pub users: Vec<CleanedUser>,
    pub report: CleaningReport,
}

impl CleanedFleet {
    /// Users left with at least one trip, as simulation timelines.
    pub fn timelines(&self) -> Vec<UserTimeline> {
        self.users
            .iter()
            .filter(|u| !u.trips.is_empty())
            .map(|u| UserTimeline::from_trips(u.user_id.clone(), u.trips.clone()))
            .collect()
    }

    pub fn overlaps(&self) -> Vec<OverlapEntry> {
        self.users
            .iter()
            .flat_map(|u| {
                u.overlaps.iter().map(|o| OverlapEntry {
                    user_id: u.user_id.clone(),
                    kept_start: o.kept.start.to_string(),
                    dropped_start: o.dropped.start.to_string(),
                })
            })
            .collect()
    }
}

pub fn clean_fleet(users: Vec<(String, Vec<Trip>)>, malformed: u64, rules: &CleaningRules) -> CleanedFleet {
    let users: Vec<CleanedUser> = users
        .into_par_iter()
        .map(|(id, trips)| clean_user(id, trips, rules))
        .collect();
    let mut report = CleaningReport {
        malformed,
        ..CleaningReport::default()
    };
    for u in &users {
        report += u.report;
    }
    CleanedFleet { users, report }
}

/// Inclusive count of calendar days from the earliest to the latest trip
/// start over all users.
pub fn observation_span_days(timelines: &[UserTimeline]) -> Option<f64> {
    let days = timelines.iter().flat_map(|t| t.trips.iter().map(|trip| trip.start.day()));
    let (lo, hi) = days.fold((i64::MAX, i64::MIN), |(lo, hi), d| (lo.min(d), hi.max(d)));
    (lo <= hi).then(|| (hi - lo + 1) as f64)
}

pub struct SimSettings {
    pub vehicles: Vec<VehicleSpec>,
    pub policies: Vec<ChargingPolicy>,
    pub initial_soc: f64,
    pub observation_days: f64,
    pub keep_traces: bool,
}

#[derive(Debug, Default)]
pub struct UserOutcome {
    /// Ordered by policy, then vehicle.
    pub rows: Vec<UserMetricsRow>,
    pub traces: Vec<SimulationResult>,
    pub failures: Vec<String>,
    pub max_conservation_residual: f64,
}

/// Runs one user under every policy and vehicle.
pub fn simulate_timeline(timeline: &UserTimeline, settings: &SimSettings) -> UserOutcome {
    let mut out = UserOutcome::default();
    for policy in &settings.policies {
        for spec in &settings.vehicles {
            let result = simulate_user(timeline, spec, policy, settings.initial_soc)
                .map_err(|e| e.to_string())
                .and_then(|r| {
                    let m = user_metrics(&r, settings.observation_days).map_err(|e| e.to_string())?;
                    Ok((r, m))
                });
            match result {
                Ok((r, metrics)) => {
                    out.max_conservation_residual = out.max_conservation_residual.max(r.conservation_residual().abs());
                    out.rows.push(UserMetricsRow {
                        user_id: timeline.user_id.clone(),
                        vehicle: spec.name.clone(),
                        policy: policy.name.clone(),
                        metrics,
                    });
                    if settings.keep_traces {
                        out.traces.push(r);
                    }
                }
                Err(e) => out.failures.push(format!("{}: {e}", timeline.user_id)),
            }
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct FleetOutcome {
    pub rows: Vec<UserMetricsRow>,
    pub traces: Vec<SimulationResult>,
    pub failures: Vec<String>,
    pub max_conservation_residual: f64,
}

pub fn simulate_fleet(timelines: &[UserTimeline], settings: &SimSettings) -> FleetOutcome {
    let per_user: Vec<UserOutcome> = timelines.par_iter().map(|t| simulate_timeline(t, settings)).collect();
    let mut out = FleetOutcome::default();
    for u in per_user {
        out.rows.extend(u.rows);
        out.traces.extend(u.traces);
        out.failures.extend(u.failures);
        out.max_conservation_residual = out.max_conservation_residual.max(u.max_conservation_residual);
    }
    out
}

/// Named accessor for one per-user quantity.
pub type Field<T> = (&'static str, fn(&T) -> f64);

pub const METRICS: [Field<UserMetrics>; 3] = [
    ("feasible_trip_pct", |m| m.feasible_trip_pct),
    ("monthly_charges", |m| m.monthly_charges),
    ("avg_soc_after_trip_pct", |m| m.avg_soc_after_trip_pct),
];

/// A per-user distribution of one metric for one (policy, vehicle) cell.
pub struct CellDistribution {
    pub metric: &'static str,
    pub policy: String,
    pub vehicle: String,
    pub summary: DistributionSummary,
}

pub struct SimulationReport {
    pub matrix: Vec<MatrixCell>,
    pub distributions: Vec<CellDistribution>,
}

pub fn summarize(rows: &[UserMetricsRow], settings: &SimSettings, bins: usize) -> Result<SimulationReport> {
    let policies: Vec<String> = settings.policies.iter().map(|p| p.name.clone()).collect();
    let vehicles: Vec<String> = settings.vehicles.iter().map(|v| v.name.clone()).collect();
    let matrix = scenario_vehicle_matrix(rows, &policies, &vehicles).map_err(|e| CliError::Empty(e.to_string()))?;
    let mut distributions = Vec::new();
    for (metric, get) in METRICS {
        for policy in &policies {
            for vehicle in &vehicles {
                let values: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.policy == *policy && r.vehicle == *vehicle)
                    .map(|r| get(&r.metrics))
                    .collect();
                let summary = aggregate(&values, bins).map_err(|e| CliError::Empty(e.to_string()))?;
                distributions.push(CellDistribution {
                    metric,
                    policy: policy.clone(),
                    vehicle: vehicle.clone(),
                    summary,
                });
            }
        }
    }
    Ok(SimulationReport { matrix, distributions })
}

pub const CHARACTERISTICS: [Field<UserCharacterization>; 4] = [
    ("active_days", |c| c.active_days as f64),
    ("avg_daily_trips", |c| c.avg_daily_trips),
    ("avg_daily_distance_km", |c| c.avg_daily_distance_km),
    ("utilization_pct", |c| c.utilization_pct),
];

pub fn characterize_fleet(users: &[CleanedUser]) -> Vec<(String, UserCharacterization)> {
    users
        .par_iter()
        .filter_map(|u| characterize_user(&u.trips).map(|c| (u.user_id.clone(), c)))
        .collect()
}

pub fn characterization_summaries(
    rows: &[(String, UserCharacterization)],
    bins: usize,
) -> Result<Vec<(&'static str, DistributionSummary)>> {
    CHARACTERISTICS
        .iter()
        .map(|(name, get)| {
            let values: Vec<f64> = rows.iter().map(|(_, c)| get(c)).collect();
            aggregate(&values, bins)
                .map(|s| (*name, s))
                .map_err(|e| CliError::Empty(e.to_string()))
        })
        .collect()
}

/// Runs `f` on a pool of `jobs` threads, or on the global pool (one thread
/// per core) when unset.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::usage(format!("cannot start {n} worker threads: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// File-name-safe form of a vehicle or policy name.
pub fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

pub fn relative_display(base: &Path, path: &Path) -> String {
    path.strip_prefix(base).unwrap_or(path).to_string_lossy().replace('\\', "/")
}
