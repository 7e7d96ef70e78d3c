//! Seeded synthetic trip-log generator.
//!
//! Every user draws from an independent ChaCha8 substream: the generator
//! is keyed with `seed_from_u64(profile.seed)` and the stream id is the
//! user index. Uniform, normal and Poisson variates are derived from raw
//! 64-bit outputs by the transforms in [`Draw`], so a given seed yields the
//! same bytes on every platform.
//!
//! Clean trips are laid out day by day inside the horizon. Injected
//! violations (for cleaning tests) are appended after the horizon, one per
//! day, so they never interact with each other or with clean trips.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::ingest::{Trip, HEADER};
use crate::time::{weekday_of_day, Timestamp, SECS_PER_DAY, SECS_PER_HOUR, SECS_PER_MINUTE};

/// Inclusive `[lo, hi]` range for per-user uniform draws.
pub type Range = (f64, f64);

/// Number of rows injected per cleaning-rule violation class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ViolationCounts {
    /// Pairs of trips separated by a sub-threshold parking.
    pub short_parking: u32,
    pub too_short: u32,
    pub too_long: u32,
    pub too_near: u32,
    pub too_far: u32,
    pub too_slow: u32,
    pub too_fast: u32,
    /// Trips starting inside another trip.
    pub overlapping: u32,
    /// Unparseable rows.
    pub malformed: u32,
}

impl ViolationCounts {
    pub fn total(&self) -> u32 {
        self.short_parking
            + self.too_short
            + self.too_long
            + self.too_near
            + self.too_far
            + self.too_slow
            + self.too_fast
            + self.overlapping
            + self.malformed
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct GeneratorProfile {
    pub name: String,
    pub seed: u64,
    pub n_users: usize,
    pub horizon_days: u32,
    /// First simulated day as `YYYY-MM-DD`.
    pub start_date: String,

    pub weekday_active_prob: Range,
    pub weekend_active_prob: Range,
    /// Per-user mean number of trips on an active day (at least 1).
    pub trips_per_day: Range,
    pub max_trips_per_day: u32,

    /// Median over users of their typical daily distance, km.
    pub daily_km_median: f64,
    /// Log-normal spread of the typical daily distance across users.
    pub daily_km_user_sigma: f64,
    /// Log-normal day-to-day spread around a user's typical distance.
    pub daily_km_day_sigma: f64,
    pub max_daily_km: f64,
    pub min_trip_km: f64,

    pub urban_share: Range,
    pub highway_share: Range,

    /// Per-user mean departure hour; daily departures scatter around it.
    pub departure_hour: Range,
    pub departure_sd_hours: f64,
    pub earliest_departure_hour: f64,
    /// No trip ends later than this hour.
    pub latest_end_hour: f64,

    pub dwell_minutes: Range,
    /// Probability that the first parking of an active weekday is a long
    /// anchor stay (work, school).
    pub anchor_prob: f64,
    pub anchor_hours: Range,

    /// Per active day probability of one long, mostly-highway trip.
    pub long_trip_prob: f64,
    pub long_trip_km: Range,
    /// Days forced active with a long trip, spread evenly over the horizon.
    pub forced_long_days: u32,

    pub inject: ViolationCounts,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeneratorError {
    #[error("invalid profile `{profile}`: {reason}")]
    InvalidProfile { profile: String, reason: String },
}

/// Mean speeds (km/h) used to turn per-category distances into durations.
const SPEED_URBAN: f64 = 25.0;
const SPEED_EXTRAURBAN: f64 = 55.0;
const SPEED_HIGHWAY: f64 = 105.0;
const MIN_TRIP_SECS: i64 = 90;
const MAX_TRIP_SECS: i64 = 11 * SECS_PER_HOUR;

impl Default for GeneratorProfile {
    fn default() -> Self {
        mixed_fleet()
    }
}

impl GeneratorProfile {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        let fail = |reason: &str| {
            Err(GeneratorError::InvalidProfile {
                profile: self.name.clone(),
                reason: reason.into(),
            })
        };
        let prob = |r: Range| 0.0 <= r.0 && r.0 <= r.1 && r.1 <= 1.0;
        let ordered = |r: Range| r.0.is_finite() && r.1.is_finite() && r.0 <= r.1;
        if self.start_day().is_none() {
            return fail("start_date must be YYYY-MM-DD");
        }
        if !prob(self.weekday_active_prob) || !prob(self.weekend_active_prob) {
            return fail("active-day probabilities must be ordered ranges within [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.anchor_prob) || !(0.0..=1.0).contains(&self.long_trip_prob) {
            return fail("anchor_prob and long_trip_prob must lie in [0, 1]");
        }
        if !prob(self.urban_share) || !prob(self.highway_share) || self.urban_share.0 + self.highway_share.0 > 1.0 {
            return fail("road-category shares must lie in [0, 1] and leave room for each other");
        }
        if !ordered(self.trips_per_day) || self.trips_per_day.0 < 1.0 || self.max_trips_per_day == 0 {
            return fail("trips_per_day must be an ordered range of at least 1");
        }
        if !(self.daily_km_median > 0.0 && self.daily_km_user_sigma >= 0.0 && self.daily_km_day_sigma >= 0.0) {
            return fail("daily distance parameters must be positive");
        }
        if !(self.min_trip_km >= 0.5 && self.max_daily_km >= self.min_trip_km && self.max_daily_km <= 800.0) {
            return fail("need 0.5 <= min_trip_km <= max_daily_km <= 800");
        }
        if !ordered(self.long_trip_km) || self.long_trip_km.0 < self.min_trip_km || self.long_trip_km.1 > 800.0 {
            return fail("long_trip_km must be an ordered range within [min_trip_km, 800]");
        }
        if !ordered(self.dwell_minutes) || self.dwell_minutes.0 < 3.0 {
            return fail("dwell_minutes must be an ordered range of at least 3 minutes");
        }
        if !ordered(self.anchor_hours) || self.anchor_hours.0 < 0.0 {
            return fail("anchor_hours must be an ordered non-negative range");
        }
        if !ordered(self.departure_hour) || !(self.departure_sd_hours >= 0.0) {
            return fail("departure parameters must be ordered and non-negative");
        }
        let earliest = self.earliest_departure_hour * SECS_PER_HOUR as f64;
        let latest = self.latest_end_hour * SECS_PER_HOUR as f64;
        if !(0.0..24.0).contains(&self.earliest_departure_hour) || !(self.latest_end_hour <= 24.0) {
            return fail("earliest_departure_hour and latest_end_hour must lie within the day");
        }
        // Night gap must exceed the short-parking merge threshold.
        if earliest + (SECS_PER_DAY as f64 - latest) <= 120.0 {
            return fail("trips of consecutive days would be closer than 2 minutes");
        }
        let slot = (MIN_TRIP_SECS as f64 + self.dwell_minutes.0 * SECS_PER_MINUTE as f64) * self.max_trips_per_day as f64;
        if latest - earliest < slot {
            return fail("max_trips_per_day cannot fit between earliest departure and latest end");
        }
        if self.forced_long_days > self.horizon_days {
            return fail("forced_long_days exceeds horizon_days");
        }
        Ok(())
    }

    fn start_day(&self) -> Option<i64> {
        let mut ts = String::from(self.start_date.as_str());
        ts.push_str("T00:00:00");
        Timestamp::parse(&ts).map(Timestamp::day)
    }
}

/// Generated trips of one user in chronological order, plus unparseable
/// rows to emit after them.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedUser {
    pub user_id: String,
    pub trips: Vec<Trip>,
    pub malformed_rows: Vec<String>,
}

impl GeneratedUser {
    pub fn write_rows<W: Write>(&self, out: &mut W) -> core::fmt::Result {
        for t in &self.trips {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                self.user_id, t.start, t.end, t.km_urban, t.km_extraurban, t.km_highway
            )?;
        }
        for row in &self.malformed_rows {
            writeln!(out, "{row}")?;
        }
        Ok(())
    }
}

pub fn write_header<W: Write>(out: &mut W) -> core::fmt::Result {
    writeln!(out, "{}", HEADER.join(","))
}

pub fn user_id(index: usize) -> String {
    alloc::format!("u{index:06}")
}

/// Generates the whole trip log as CSV bytes in the ingest format.
pub fn generate(profile: &GeneratorProfile) -> Result<Vec<u8>, GeneratorError> {
    profile.validate()?;
    let mut out = String::new();
    write_header(&mut out).expect("writing to a String cannot fail");
    for index in 0..profile.n_users {
        generate_user(profile, index)?
            .write_rows(&mut out)
            .expect("writing to a String cannot fail");
    }
    Ok(out.into_bytes())
}

/// Generates one user's trips from its own substream.
pub fn generate_user(profile: &GeneratorProfile, index: usize) -> Result<GeneratedUser, GeneratorError> {
    profile.validate()?;
    let start_day = profile.start_day().expect("validated");
    let mut rng = Draw::for_user(profile.seed, index as u64);
    let user = UserTraits::draw(profile, &mut rng);

    let forced: Vec<i64> = (0..profile.forced_long_days as i64)
        .map(|j| (j + 1) * profile.horizon_days as i64 / (profile.forced_long_days as i64 + 1))
        .collect();

    let mut trips = Vec::new();
    for offset in 0..profile.horizon_days as i64 {
        let day = start_day + offset;
        let weekend = weekday_of_day(day).number_from_monday() >= 6;
        let p_active = if weekend { user.weekend_active } else { user.weekday_active };
        let active = rng.uniform() < p_active;
        let force_long = forced.contains(&offset);
        if !active && !force_long {
            continue;
        }
        build_day(profile, &user, &mut rng, day, weekend, force_long, &mut trips);
    }

    let mut malformed_rows = Vec::new();
    let uid = user_id(index);
    let tail_start = start_day + profile.horizon_days as i64 + 1;
    inject(profile, index, &uid, tail_start, &mut trips, &mut malformed_rows);

    Ok(GeneratedUser {
        user_id: uid,
        trips,
        malformed_rows,
    })
}

/// Portable variates from a ChaCha8 stream.
pub struct Draw(ChaCha8Rng);

impl Draw {
    pub fn for_user(seed: u64, user_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(user_index);
        Self(rng)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn range(&mut self, r: Range) -> f64 {
        r.0 + (r.1 - r.0) * self.uniform()
    }

    /// Standard normal by Box–Muller (one value per two uniforms).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
    }

    /// Poisson variate by multiplication of uniforms; `lambda` is small.
    pub fn poisson(&mut self, lambda: f64) -> u32 {
        let limit = libm::exp(-lambda);
        let mut k = 0;
        let mut p = self.uniform();
        while p > limit {
            k += 1;
            p *= self.uniform();
        }
        k
    }
}

struct UserTraits {
    weekday_active: f64,
    weekend_active: f64,
    trips_mean: f64,
    daily_km: f64,
    urban_share: f64,
    highway_share: f64,
    departure_hour: f64,
}

impl UserTraits {
    fn draw(p: &GeneratorProfile, rng: &mut Draw) -> Self {
        let weekday_active = rng.range(p.weekday_active_prob);
        let weekend_active = rng.range(p.weekend_active_prob);
        let trips_mean = rng.range(p.trips_per_day);
        let daily_km = libm::exp(libm::log(p.daily_km_median) + p.daily_km_user_sigma * rng.normal());
        let mut urban_share = rng.range(p.urban_share);
        let mut highway_share = rng.range(p.highway_share);
        if urban_share + highway_share > 1.0 {
            let s = urban_share + highway_share;
            urban_share /= s;
            highway_share /= s;
        }
        let departure_hour = rng.range(p.departure_hour);
        Self {
            weekday_active,
            weekend_active,
            trips_mean,
            daily_km,
            urban_share,
            highway_share,
            departure_hour,
        }
    }
}

fn round_m(km: f64) -> f64 {
    libm::round(km * 1000.0) / 1000.0
}

/// A trip of `km` split by shares, with a duration from category speeds
/// scaled by `pace`.
fn shaped_trip(km: f64, urban: f64, highway: f64, pace: f64) -> (f64, f64, f64, i64) {
    let u = round_m(km * urban);
    let h = round_m(km * highway);
    let e = round_m((km - u - h).max(0.0));
    let hours = (u / SPEED_URBAN + e / SPEED_EXTRAURBAN + h / SPEED_HIGHWAY) * pace;
    let secs = (libm::round(hours * SECS_PER_HOUR as f64) as i64).max(MIN_TRIP_SECS);
    (u, e, h, secs)
}

fn build_day(
    p: &GeneratorProfile,
    user: &UserTraits,
    rng: &mut Draw,
    day: i64,
    weekend: bool,
    force_long: bool,
    trips: &mut Vec<Trip>,
) {
    let count = (1 + rng.poisson(user.trips_mean - 1.0)).min(p.max_trips_per_day) as usize;
    let day_km = (user.daily_km * libm::exp(p.daily_km_day_sigma * rng.normal())).min(p.max_daily_km);
    let long = force_long || rng.uniform() < p.long_trip_prob;
    let long_km = if long { rng.range(p.long_trip_km) } else { 0.0 };

    let weights: Vec<f64> = (0..count).map(|_| 0.5 + rng.uniform()).collect();
    let weight_sum: f64 = weights.iter().sum();
    let rest_km = if long { day_km.min(p.max_daily_km - long_km).max(0.0) } else { day_km };

    let mut legs: Vec<(f64, f64, f64, i64)> = Vec::with_capacity(count + 1);
    if long {
        legs.push(shaped_trip(long_km, 0.05, 0.85, rng.range((0.9, 1.15))));
    }
    let legs_from_rest = if long { count.saturating_sub(1) } else { count };
    for w in weights.iter().take(legs_from_rest) {
        let km = (rest_km * w / weight_sum).max(p.min_trip_km);
        let jitter = 0.1 * (rng.uniform() - 0.5);
        let urban = (user.urban_share + jitter).clamp(0.0, 1.0);
        let highway = user.highway_share.min(1.0 - urban);
        legs.push(shaped_trip(km, urban, highway, rng.range((0.9, 1.15))));
    }

    let mut dwells: Vec<i64> = (1..legs.len())
        .map(|i| {
            let anchor = i == 1 && !weekend && rng.uniform() < p.anchor_prob;
            let hours = if anchor {
                rng.range(p.anchor_hours)
            } else {
                rng.range(p.dwell_minutes) / 60.0
            };
            libm::round(hours * SECS_PER_HOUR as f64) as i64
        })
        .collect();

    let earliest = libm::round(p.earliest_departure_hour * SECS_PER_HOUR as f64) as i64;
    let latest = libm::round(p.latest_end_hour * SECS_PER_HOUR as f64) as i64;
    let departure_hour = user.departure_hour + p.departure_sd_hours * rng.normal();
    let mut depart = (libm::round(departure_hour * SECS_PER_HOUR as f64) as i64).clamp(earliest, latest);

    fit_day(p, &mut legs, &mut dwells, &mut depart, earliest, latest);

    let mut t = day * SECS_PER_DAY + depart;
    for (i, &(u, e, h, secs)) in legs.iter().enumerate() {
        if i > 0 {
            t += dwells[i - 1];
        }
        trips.push(Trip {
            start: Timestamp::from_secs(t),
            end: Timestamp::from_secs(t + secs),
            km_urban: u,
            km_extraurban: e,
            km_highway: h,
        });
        t += secs;
    }
}

/// Squeezes a day into `[earliest, latest]`: shrink dwells to the minimum,
/// move the departure earlier, drop trailing legs, then shorten the last
/// remaining leg.
fn fit_day(
    p: &GeneratorProfile,
    legs: &mut Vec<(f64, f64, f64, i64)>,
    dwells: &mut Vec<i64>,
    depart: &mut i64,
    earliest: i64,
    latest: i64,
) {
    let min_dwell = libm::ceil(p.dwell_minutes.0 * SECS_PER_MINUTE as f64) as i64;
    let span = |legs: &[(f64, f64, f64, i64)], dwells: &[i64]| {
        legs.iter().map(|l| l.3).sum::<i64>() + dwells.iter().sum::<i64>()
    };
    for leg in legs.iter_mut() {
        if leg.3 > MAX_TRIP_SECS {
            let scale = MAX_TRIP_SECS as f64 / leg.3 as f64;
            *leg = shaped_trip_scaled(*leg, scale);
        }
    }
    if *depart + span(legs, dwells) <= latest {
        return;
    }
    let excess = *depart + span(legs, dwells) - latest;
    let slack: i64 = dwells.iter().map(|d| d - min_dwell).sum();
    if slack > 0 {
        let cut = excess.min(slack);
        let mut remaining = cut;
        let total_slack = slack as f64;
        for d in dwells.iter_mut() {
            let share = libm::ceil(cut as f64 * (*d - min_dwell) as f64 / total_slack) as i64;
            let take = share.min(*d - min_dwell).min(remaining);
            *d -= take;
            remaining -= take;
        }
    }
    if *depart + span(legs, dwells) > latest {
        *depart = (latest - span(legs, dwells)).max(earliest);
    }
    while legs.len() > 1 && *depart + span(legs, dwells) > latest {
        legs.pop();
        dwells.pop();
    }
    if *depart + span(legs, dwells) > latest {
        let room = latest - *depart;
        let scale = room as f64 / legs[0].3 as f64;
        legs[0] = shaped_trip_scaled(legs[0], scale);
    }
}

fn shaped_trip_scaled(leg: (f64, f64, f64, i64), scale: f64) -> (f64, f64, f64, i64) {
    let (u, e, h, secs) = leg;
    let secs = ((secs as f64 * scale) as i64).max(MIN_TRIP_SECS);
    (round_m(u * scale), round_m(e * scale), round_m(h * scale), secs)
}

/// Share of `total` injections assigned to user `index` of `n`.
fn share(total: u32, index: usize, n: usize) -> u32 {
    let (q, r) = (total as usize / n, total as usize % n);
    (q + usize::from(index < r)) as u32
}

fn inject(
    p: &GeneratorProfile,
    index: usize,
    uid: &str,
    tail_start: i64,
    trips: &mut Vec<Trip>,
    malformed: &mut Vec<String>,
) {
    let n = p.n_users.max(1);
    let counts = &p.inject;
    let mut day = tail_start;
    let mut next_day = || {
        let d = day;
        day += 1;
        d * SECS_PER_DAY
    };
    let trip = |start: i64, secs: i64, km: f64| Trip {
        start: Timestamp::from_secs(start),
        end: Timestamp::from_secs(start + secs),
        km_urban: 0.0,
        km_extraurban: km,
        km_highway: 0.0,
    };
    let at = |h: i64| h * SECS_PER_HOUR;

    for _ in 0..share(counts.short_parking, index, n) {
        let d = next_day();
        trips.push(trip(d + at(10), 20 * 60, 15.0));
        trips.push(trip(d + at(10) + 21 * 60, 20 * 60, 15.0));
    }
    // (start hour, duration secs, km), each failing exactly one rule first.
    let singles: [(u32, i64, i64, f64); 6] = [
        (counts.too_short, at(10), 30, 0.3),
        (counts.too_long, at(5), 13 * SECS_PER_HOUR, 780.0),
        (counts.too_near, at(10), 120, 0.003),
        (counts.too_far, at(6), 8 * SECS_PER_HOUR, 850.0),
        (counts.too_slow, at(10), SECS_PER_HOUR, 2.0),
        (counts.too_fast, at(10), SECS_PER_HOUR, 140.0),
    ];
    for (count, start, secs, km) in singles {
        for _ in 0..share(count, index, n) {
            let d = next_day();
            trips.push(trip(d + start, secs, km));
        }
    }
    for _ in 0..share(counts.overlapping, index, n) {
        let d = next_day();
        trips.push(trip(d + at(10), SECS_PER_HOUR, 30.0));
        trips.push(trip(d + at(10) + 30 * 60, SECS_PER_HOUR, 30.0));
    }
    for k in 0..share(counts.malformed, index, n) {
        let d = Timestamp::from_secs(next_day() + at(10));
        let e = d.add_secs(SECS_PER_HOUR);
        malformed.push(match k % 3 {
            0 => alloc::format!("{uid},{}T99:00:00,{e},1.0,2.0,3.0", d.date()),
            1 => alloc::format!("{uid},{d},{e},-1.0,2.0,3.0"),
            _ => alloc::format!("{uid},{d},{e},1.0,2.0"),
        });
    }
}

/// Mixed population tuned to a median of roughly 40 km per active day.
pub fn mixed_fleet() -> GeneratorProfile {
    GeneratorProfile {
        name: "mixed-fleet".into(),
        seed: 20231001,
        n_users: 1000,
        horizon_days: 365,
        start_date: "2023-10-01".into(),
        weekday_active_prob: (0.55, 0.98),
        weekend_active_prob: (0.3, 0.85),
        trips_per_day: (1.5, 7.0),
        max_trips_per_day: 14,
        daily_km_median: 32.0,
        daily_km_user_sigma: 0.55,
        daily_km_day_sigma: 0.45,
        max_daily_km: 600.0,
        min_trip_km: 0.5,
        urban_share: (0.3, 0.8),
        highway_share: (0.0, 0.35),
        departure_hour: (6.5, 10.0),
        departure_sd_hours: 1.0,
        earliest_departure_hour: 5.0,
        latest_end_hour: 23.5,
        dwell_minutes: (10.0, 150.0),
        anchor_prob: 0.5,
        anchor_hours: (4.0, 9.0),
        long_trip_prob: 0.02,
        long_trip_km: (120.0, 400.0),
        forced_long_days: 0,
        inject: ViolationCounts::default(),
    }
}

/// Short weekday commutes with nights at home: fits a small battery with
/// overnight charging.
pub fn commuter() -> GeneratorProfile {
    GeneratorProfile {
        name: "commuter".into(),
        n_users: 200,
        weekday_active_prob: (0.9, 1.0),
        weekend_active_prob: (0.2, 0.6),
        trips_per_day: (2.0, 4.0),
        max_trips_per_day: 6,
        daily_km_median: 35.0,
        daily_km_user_sigma: 0.3,
        daily_km_day_sigma: 0.3,
        max_daily_km: 80.0,
        urban_share: (0.3, 0.6),
        highway_share: (0.0, 0.3),
        departure_hour: (7.25, 8.0),
        departure_sd_hours: 0.3,
        earliest_departure_hour: 7.0,
        latest_end_hour: 19.5,
        dwell_minutes: (10.0, 90.0),
        anchor_prob: 1.0,
        anchor_hours: (8.0, 9.5),
        long_trip_prob: 0.0,
        ..mixed_fleet()
    }
}

/// Long daily mileage with short daytime stops; some single trips exceed
/// the range of every reference vehicle.
pub fn long_hauler() -> GeneratorProfile {
    GeneratorProfile {
        name: "long-hauler".into(),
        n_users: 100,
        weekday_active_prob: (0.85, 0.95),
        weekend_active_prob: (0.2, 0.4),
        trips_per_day: (3.0, 6.0),
        max_trips_per_day: 8,
        daily_km_median: 220.0,
        daily_km_user_sigma: 0.25,
        daily_km_day_sigma: 0.35,
        max_daily_km: 700.0,
        urban_share: (0.1, 0.3),
        highway_share: (0.4, 0.7),
        departure_hour: (5.5, 7.0),
        departure_sd_hours: 0.5,
        earliest_departure_hour: 5.0,
        latest_end_hour: 21.5,
        dwell_minutes: (10.0, 90.0),
        anchor_prob: 0.0,
        long_trip_prob: 0.3,
        long_trip_km: (200.0, 450.0),
        forced_long_days: 2,
        ..mixed_fleet()
    }
}

/// A short mixed-fleet log with a known number of rows violating each
/// cleaning rule.
pub fn dirty_data() -> GeneratorProfile {
    GeneratorProfile {
        name: "dirty-data".into(),
        n_users: 100,
        horizon_days: 60,
        inject: ViolationCounts {
            short_parking: 50,
            too_short: 100,
            too_long: 20,
            too_near: 30,
            too_far: 20,
            too_slow: 40,
            too_fast: 40,
            overlapping: 15,
            malformed: 25,
        },
        ..mixed_fleet()
    }
}

/// The named presets: commuter, long-hauler, mixed-fleet, dirty-data.
pub fn preset_profiles() -> Vec<GeneratorProfile> {
    alloc::vec![commuter(), long_hauler(), mixed_fleet(), dirty_data()]
}

pub fn preset(name: &str) -> Option<GeneratorProfile> {
    preset_profiles().into_iter().find(|p| p.name == name)
}
