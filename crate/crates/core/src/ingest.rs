//! Trip records, parking events and the trip-log cleaning pipeline.
//!
//! Cleaning runs per user, in this order:
//!
//! 1. sort by start time and drop trips that start before the previous
//!    kept trip has ended ([`sort_and_validate_user`]);
//! 2. merge trips separated by a parking shorter than the merge threshold
//!    ([`merge_short_parkings`]);
//! 3. drop trips outside the duration, distance and average-speed bounds
//!    ([`filter_trips`]).
//!
//! Parking events are then the gaps between consecutive cleaned trips
//! ([`derive_parkings`]).

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::AddAssign;

use crate::time::{Timestamp, SECS_PER_HOUR};

/// One ignition-on to ignition-off drive, without its owner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trip {
    pub start: Timestamp,
    pub end: Timestamp,
    pub km_urban: f64,
    pub km_extraurban: f64,
    pub km_highway: f64,
}

impl Trip {
    pub fn total_km(&self) -> f64 {
        self.km_urban + self.km_extraurban + self.km_highway
    }

    pub fn duration_secs(&self) -> i64 {
        self.end.secs() - self.start.secs()
    }

    /// Average speed over the wall-clock duration, km/h.
    pub fn avg_speed_kmh(&self) -> f64 {
        self.total_km() * SECS_PER_HOUR as f64 / self.duration_secs() as f64
    }
}

/// A trip as read from a trip log, tagged with its user.
#[derive(Debug, Clone, PartialEq)]
pub struct TripRecord {
    pub user_id: String,
    pub trip: Trip,
}

/// The interval between the end of a trip and the start of its successor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParkingEvent {
    pub start: Timestamp,
    pub end: Timestamp,
}

impl ParkingEvent {
    pub fn duration_secs(&self) -> i64 {
        self.end.secs() - self.start.secs()
    }
}

/// Why a row of a trip log could not become a [`TripRecord`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RowError {
    #[error("expected 6 fields, found {0}")]
    FieldCount(usize),
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("bad timestamp in `{0}`")]
    BadTimestamp(&'static str),
    #[error("bad number in `{0}`")]
    BadNumber(&'static str),
    #[error("negative distance in `{0}`")]
    NegativeDistance(&'static str),
    #[error("end_ts is not after start_ts")]
    NonPositiveDuration,
}

pub const HEADER: [&str; 6] = [
    "user_id",
    "start_ts",
    "end_ts",
    "km_urban",
    "km_extraurban",
    "km_highway",
];

impl TripRecord {
    /// Validates the six fields of one trip-log row (header order).
    pub fn from_fields(fields: &[&str]) -> Result<Self, RowError> {
        if fields.len() != HEADER.len() {
            return Err(RowError::FieldCount(fields.len()));
        }
        for (value, name) in fields.iter().zip(HEADER) {
            if value.trim().is_empty() {
                return Err(RowError::MissingField(name));
            }
        }
        let ts = |i: usize| Timestamp::parse(fields[i].trim()).ok_or(RowError::BadTimestamp(HEADER[i]));
        let km = |i: usize| -> Result<f64, RowError> {
            let v: f64 = fields[i].trim().parse().map_err(|_| RowError::BadNumber(HEADER[i]))?;
            if !v.is_finite() {
                return Err(RowError::BadNumber(HEADER[i]));
            }
            if v < 0.0 {
                return Err(RowError::NegativeDistance(HEADER[i]));
            }
            Ok(v)
        };
        let trip = Trip {
            start: ts(1)?,
            end: ts(2)?,
            km_urban: km(3)?,
            km_extraurban: km(4)?,
            km_highway: km(5)?,
        };
        if trip.end <= trip.start {
            return Err(RowError::NonPositiveDuration);
        }
        Ok(Self {
            user_id: String::from(fields[0].trim()),
            trip,
        })
    }
}

/// Thresholds of the cleaning pipeline. Every bound is inclusive: a trip
/// sitting exactly on a limit is retained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CleaningRules {
    /// Parkings strictly shorter than this merge their neighbouring trips.
    pub merge_gap_secs: i64,
    pub min_duration_secs: i64,
    pub max_duration_secs: i64,
    pub min_km: f64,
    pub max_km: f64,
    pub min_speed_kmh: f64,
    pub max_speed_kmh: f64,
}

impl Default for CleaningRules {
    fn default() -> Self {
        Self {
            merge_gap_secs: 120,
            min_duration_secs: 60,
            max_duration_secs: 12 * SECS_PER_HOUR,
            min_km: 0.005,
            max_km: 800.0,
            min_speed_kmh: 5.0,
            max_speed_kmh: 130.0,
        }
    }
}

/// Slack on the average-speed bounds so that trips exactly on a limit are
/// not rejected by floating-point rounding.
const SPEED_EPS_KMH: f64 = 1e-9;

/// Which filter rejected a trip. The first failing rule, in declaration
/// order, is the one reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    TooShort,
    TooLong,
    TooNear,
    TooFar,
    TooSlow,
    TooFast,
}

impl CleaningRules {
    pub fn judge(&self, trip: &Trip) -> Option<Rejection> {
        let secs = trip.duration_secs();
        let km = trip.total_km();
        if secs < self.min_duration_secs {
            Some(Rejection::TooShort)
        } else if secs > self.max_duration_secs {
            Some(Rejection::TooLong)
        } else if km < self.min_km {
            Some(Rejection::TooNear)
        } else if km > self.max_km {
            Some(Rejection::TooFar)
        } else {
            let speed = trip.avg_speed_kmh();
            if speed < self.min_speed_kmh - SPEED_EPS_KMH {
                Some(Rejection::TooSlow)
            } else if speed > self.max_speed_kmh + SPEED_EPS_KMH {
                Some(Rejection::TooFast)
            } else {
                None
            }
        }
    }
}

/// Per-rule tallies of a cleaning run.
///
/// `input` counts well-formed records entering the pipeline; malformed rows
/// never become records and are tallied separately. The counters satisfy
/// `input - overlapping - short_parking_merges - rejected() == retained`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CleaningReport {
    pub input: u64,
    pub malformed: u64,
    pub overlapping: u64,
    pub short_parking_merges: u64,
    pub too_short: u64,
    pub too_long: u64,
    pub too_near: u64,
    pub too_far: u64,
    pub too_slow: u64,
    pub too_fast: u64,
    pub retained: u64,
}

impl CleaningReport {
    /// Trips dropped by the duration/distance/speed filters.
    pub fn rejected(&self) -> u64 {
        self.too_short + self.too_long + self.too_near + self.too_far + self.too_slow + self.too_fast
    }

    pub fn reconciles(&self) -> bool {
        self.input
            .checked_sub(self.overlapping + self.short_parking_merges + self.rejected())
            == Some(self.retained)
    }

    fn tally(&mut self, rejection: Rejection) {
        match rejection {
            Rejection::TooShort => self.too_short += 1,
            Rejection::TooLong => self.too_long += 1,
            Rejection::TooNear => self.too_near += 1,
            Rejection::TooFar => self.too_far += 1,
            Rejection::TooSlow => self.too_slow += 1,
            Rejection::TooFast => self.too_fast += 1,
        }
    }
}

impl AddAssign for CleaningReport {
    fn add_assign(&mut self, rhs: Self) {
        self.input += rhs.input;
        self.malformed += rhs.malformed;
        self.overlapping += rhs.overlapping;
        self.short_parking_merges += rhs.short_parking_merges;
        self.too_short += rhs.too_short;
        self.too_long += rhs.too_long;
        self.too_near += rhs.too_near;
        self.too_far += rhs.too_far;
        self.too_slow += rhs.too_slow;
        self.too_fast += rhs.too_fast;
        self.retained += rhs.retained;
    }
}

/// A trip dropped because it started before its predecessor ended.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapDiagnostic {
    pub kept: Trip,
    pub dropped: Trip,
}

/// Sorts a single user's trips by start time and removes overlaps.
///
/// A trip whose start precedes the end of the last kept trip is dropped and
/// reported. Ties on start time are broken by end time, so exact duplicates
/// keep their first copy.
pub fn sort_and_validate_user(mut trips: Vec<Trip>) -> (Vec<Trip>, Vec<OverlapDiagnostic>) {
    trips.sort_by(|a, b| a.start.cmp(&b.start).then(a.end.cmp(&b.end)));
    let mut kept: Vec<Trip> = Vec::with_capacity(trips.len());
    let mut overlaps = Vec::new();
    for trip in trips {
        match kept.last() {
            Some(prev) if trip.start < prev.end => overlaps.push(OverlapDiagnostic {
                kept: *prev,
                dropped: trip,
            }),
            _ => kept.push(trip),
        }
    }
    (kept, overlaps)
}

/// Collapses every parking strictly shorter than `threshold_secs`, joining
/// the surrounding trips. Chains of short gaps collapse into one trip.
/// Returns the merged sequence and the number of merges performed.
pub fn merge_short_parkings(trips: Vec<Trip>, threshold_secs: i64) -> (Vec<Trip>, u64) {
    let mut merged: Vec<Trip> = Vec::with_capacity(trips.len());
    let mut merges = 0;
    for trip in trips {
        match merged.last_mut() {
            Some(prev) if trip.start.secs() - prev.end.secs() < threshold_secs => {
                prev.end = trip.end;
                prev.km_urban += trip.km_urban;
                prev.km_extraurban += trip.km_extraurban;
                prev.km_highway += trip.km_highway;
                merges += 1;
            }
            _ => merged.push(trip),
        }
    }
    (merged, merges)
}

/// Applies the duration, distance and average-speed bounds.
///
/// The returned report carries only the filter tallies plus `retained`.
pub fn filter_trips(trips: Vec<Trip>, rules: &CleaningRules) -> (Vec<Trip>, CleaningReport) {
    let mut report = CleaningReport::default();
    let retained: Vec<Trip> = trips
        .into_iter()
        .filter(|t| match rules.judge(t) {
            Some(r) => {
                report.tally(r);
                false
            }
            None => true,
        })
        .collect();
    report.retained = retained.len() as u64;
    (retained, report)
}

/// Parking events between consecutive trips: `n - 1` events for `n` trips.
pub fn derive_parkings(trips: &[Trip]) -> Vec<ParkingEvent> {
    trips
        .windows(2)
        .map(|w| ParkingEvent {
            start: w[0].end,
            end: w[1].start,
        })
        .collect()
}

/// One user's cleaned trips with the report and overlap diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct CleanedUser {
    pub user_id: String,
    pub trips: Vec<Trip>,
    pub report: CleaningReport,
    pub overlaps: Vec<OverlapDiagnostic>,
}

/// Full cleaning pipeline for one user's trips.
pub fn clean_user(user_id: String, trips: Vec<Trip>, rules: &CleaningRules) -> CleanedUser {
    let input = trips.len() as u64;
    let (sorted, overlaps) = sort_and_validate_user(trips);
    let (merged, merges) = merge_short_parkings(sorted, rules.merge_gap_secs);
    let (trips, mut report) = filter_trips(merged, rules);
    report.input = input;
    report.overlapping = overlaps.len() as u64;
    report.short_parking_merges = merges;
    CleanedUser {
        user_id,
        trips,
        report,
        overlaps,
    }
}
