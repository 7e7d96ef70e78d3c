//! Per-user outcome metrics, driving-behaviour characterisation and
//! distribution summaries.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::ingest::Trip;
use crate::sim::SimulationResult;
use crate::time::SECS_PER_DAY;

/// Mean Gregorian month in days (365.25 / 12, commonly quoted as 30.44), so
/// a one-year window normalizes to exactly twelve months.
pub const DAYS_PER_MONTH: f64 = 365.25 / 12.0;

/// Users completing at least this share of their trips are suitable.
pub const SUITABILITY_THRESHOLD_PCT: f64 = 99.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserMetrics {
    pub feasible_trip_pct: f64,
    pub monthly_charges: f64,
    pub avg_soc_after_trip_pct: f64,
    pub suitable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("user `{0}` has no trips")]
    NoTrips(String),
    #[error("observation window must be positive")]
    ObservationDays,
    #[error("no values to aggregate")]
    Empty,
    #[error("no results for policy `{policy}` with vehicle `{vehicle}`")]
    MissingCombination { policy: String, vehicle: String },
}

/// Suitability is inclusive of the threshold.
pub fn is_suitable(feasible_trip_pct: f64) -> bool {
    feasible_trip_pct >= SUITABILITY_THRESHOLD_PCT
}

/// Feasible-trip share, charging sessions per month and mean SoC after a
/// trip (infeasible trips count as 0 %).
pub fn user_metrics(result: &SimulationResult, observation_days: f64) -> Result<UserMetrics, MetricsError> {
    if !(observation_days > 0.0) {
        return Err(MetricsError::ObservationDays);
    }
    if result.trips.is_empty() {
        return Err(MetricsError::NoTrips(result.user_id.clone()));
    }
    let n = result.trips.len() as f64;
    let feasible_trip_pct = 100.0 * result.feasible_trips() as f64 / n;
    let monthly_charges = result.charges.len() as f64 / (observation_days / DAYS_PER_MONTH);
    let soc_sum: f64 = result
        .trips
        .iter()
        .map(|t| 100.0 * t.soc_after_kwh / result.capacity_kwh)
        .sum();
    Ok(UserMetrics {
        feasible_trip_pct,
        monthly_charges,
        avg_soc_after_trip_pct: soc_sum / n,
        suitable: is_suitable(feasible_trip_pct),
    })
}

/// Driving behaviour on active days, i.e. dates on which at least one trip
/// starts. A trip belongs entirely to the date it starts on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserCharacterization {
    pub active_days: usize,
    pub avg_daily_trips: f64,
    pub avg_daily_distance_km: f64,
    pub utilization_pct: f64,
}

/// Characterises one user's cleaned trips, or `None` when there are none.
///
/// Utilisation of a day is the summed duration of the trips starting that
/// day over 24 h, capped at 100 %.
pub fn characterize_user(trips: &[Trip]) -> Option<UserCharacterization> {
    if trips.is_empty() {
        return None;
    }
    // day -> (trips, km, driving seconds)
    let mut days: BTreeMap<i64, (usize, f64, i64)> = BTreeMap::new();
    for trip in trips {
        let entry = days.entry(trip.start.day()).or_default();
        entry.0 += 1;
        entry.1 += trip.total_km();
        entry.2 += trip.duration_secs();
    }
    let active = days.len() as f64;
    let (mut km, mut util) = (0.0, 0.0);
    for (_, day_km, secs) in days.values() {
        km += day_km;
        util += (100.0 * *secs as f64 / SECS_PER_DAY as f64).min(100.0);
    }
    Some(UserCharacterization {
        active_days: days.len(),
        avg_daily_trips: trips.len() as f64 / active,
        avg_daily_distance_km: km / active,
        utilization_pct: util / active,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    /// Share of values in the bin; bins sum to 1.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSummary {
    pub count: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub histogram: Vec<HistogramBin>,
}

impl DistributionSummary {
    /// Cumulative mass at the upper edge of each bin.
    pub fn cdf(&self) -> Vec<f64> {
        self.histogram
            .iter()
            .scan(0.0, |acc, b| {
                *acc += b.mass;
                Some(*acc)
            })
            .collect()
    }
}

/// Quantile of sorted data by linear interpolation between the closest
/// order statistics (position `p * (n - 1)`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = libm::floor(pos) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Summarises a set of values with `bins` equal-width histogram bins over
/// `[min, max]`. Values are sorted first, so the result does not depend on
/// input order.
pub fn aggregate(values: &[f64], bins: usize) -> Result<DistributionSummary, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted_mean(&sorted);
    let var = sorted.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);

    let bins = bins.max(1);
    let histogram = if max > min {
        let width = (max - min) / bins as f64;
        let mut counts = alloc::vec![0usize; bins];
        for v in &sorted {
            let idx = (((v - min) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        counts
            .iter()
            .enumerate()
            .map(|(i, &c)| HistogramBin {
                lo: min + width * i as f64,
                hi: if i + 1 == bins { max } else { min + width * (i + 1) as f64 },
                mass: c as f64 / n,
            })
            .collect()
    } else {
        alloc::vec![HistogramBin { lo: min, hi: max, mass: 1.0 }]
    };

    Ok(DistributionSummary {
        count: sorted.len(),
        mean,
        std: libm::sqrt(var),
        min,
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q3: quantile_sorted(&sorted, 0.75),
        max,
        histogram,
    })
}

fn sorted_mean(sorted: &[f64]) -> f64 {
    sorted.iter().sum::<f64>() / sorted.len() as f64
}

/// Mean of `values`, summed in sorted order so it is independent of input
/// order and equal to [`aggregate`]'s mean.
pub fn order_independent_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Some(sorted_mean(&sorted))
}

/// One user's metrics under one vehicle and policy.
#[derive(Debug, Clone, PartialEq)]
pub struct UserMetricsRow {
    pub user_id: String,
    pub vehicle: String,
    pub policy: String,
    pub metrics: UserMetrics,
}

/// Fleet averages for one (policy, vehicle) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCell {
    pub policy: String,
    pub vehicle: String,
    pub users: usize,
    pub mean_feasible_trip_pct: f64,
    pub mean_avg_soc_after_trip_pct: f64,
    pub mean_monthly_charges: f64,
    pub suitable_user_pct: f64,
}

/// Averages per-user metrics into a policy × vehicle table, ordered by
/// `policies` then `vehicles`. Every combination must have at least one
/// user.
pub fn scenario_vehicle_matrix(
    rows: &[UserMetricsRow],
    policies: &[String],
    vehicles: &[String],
) -> Result<Vec<MatrixCell>, MetricsError> {
    let mut cells: BTreeMap<(&str, &str), Vec<&UserMetrics>> = BTreeMap::new();
    for row in rows {
        cells
            .entry((row.policy.as_str(), row.vehicle.as_str()))
            .or_default()
            .push(&row.metrics);
    }
    let mut out = Vec::with_capacity(policies.len() * vehicles.len());
    let mut seen = BTreeSet::new();
    for policy in policies {
        for vehicle in vehicles {
            if !seen.insert((policy, vehicle)) {
                continue;
            }
            let Some(metrics) = cells.get(&(policy.as_str(), vehicle.as_str())) else {
                return Err(MetricsError::MissingCombination {
                    policy: policy.clone(),
                    vehicle: vehicle.clone(),
                });
            };
            let mean_of = |f: fn(&UserMetrics) -> f64| {
                let values: Vec<f64> = metrics.iter().map(|m| f(m)).collect();
                order_independent_mean(&values).unwrap_or(0.0)
            };
            out.push(MatrixCell {
                policy: policy.clone(),
                vehicle: vehicle.clone(),
                users: metrics.len(),
                mean_feasible_trip_pct: mean_of(|m| m.feasible_trip_pct),
                mean_avg_soc_after_trip_pct: mean_of(|m| m.avg_soc_after_trip_pct),
                mean_monthly_charges: mean_of(|m| m.monthly_charges),
                suitable_user_pct: mean_of(|m| if m.suitable { 100.0 } else { 0.0 }),
            });
        }
    }
    Ok(out)
}
