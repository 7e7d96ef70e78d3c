//! Shared test fixtures: a second-by-second replay used as an oracle for
//! the event-driven simulator, and synthetic corpora.
#![allow(dead_code)]

use evreplay_core::charging::{ChargeWindow, ChargingPolicy};
use evreplay_core::energy::VehicleSpec;
use evreplay_core::ingest::{clean_user, CleaningRules, Trip};
use evreplay_core::sim::UserTimeline;
use evreplay_core::synthgen::{self, generate_user, GeneratorProfile};

const DAY: i64 = 86_400;
const TOL: f64 = 1e-9;

/// Second-resolution membership test for a policy's charging window.
struct WindowMask {
    any: bool,
    days: [bool; 7],
    start: i64,
    end: i64,
}

impl WindowMask {
    fn new(policy: &ChargingPolicy) -> Self {
        match policy.window {
            ChargeWindow::AnyTime => Self {
                any: true,
                days: [true; 7],
                start: 0,
                end: DAY,
            },
            ChargeWindow::Weekly(w) => {
                let mut days = [false; 7];
                for d in w.days.iter() {
                    days[d.num_days_from_monday() as usize] = true;
                }
                Self {
                    any: false,
                    days,
                    start: w.start.secs(),
                    end: w.end.secs(),
                }
            }
        }
    }

    fn contains(&self, t: i64) -> bool {
        if self.any {
            return true;
        }
        let day = t.div_euclid(DAY);
        let tod = t.rem_euclid(DAY);
        // 1970-01-01 was a Thursday.
        let weekday = |d: i64| (d + 3).rem_euclid(7) as usize;
        if self.start < self.end {
            self.days[weekday(day)] && tod >= self.start && tod < self.end
        } else {
            (self.days[weekday(day)] && tod >= self.start) || (self.days[weekday(day - 1)] && tod < self.end)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleTrip {
    pub feasible: bool,
    pub soc_after_kwh: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    pub trips: Vec<OracleTrip>,
    pub charges: usize,
    pub charged_kwh: f64,
    pub final_soc_kwh: f64,
}

fn energy_kwh(spec: &VehicleSpec, t: &Trip) -> f64 {
    (t.km_urban * spec.rate_urban_wh_per_km
        + t.km_extraurban * spec.rate_combined_wh_per_km
        + t.km_highway * spec.rate_highway_wh_per_km)
        / 1000.0
}

/// Replays chronologically ordered trips one second at a time: energy is
/// drawn evenly over each trip's seconds, and during each parking the
/// charger runs second by second over the first in-window stretch that is
/// long enough, if the battery was below the trigger when it began.
pub fn replay_per_second(trips: &[Trip], spec: &VehicleSpec, policy: &ChargingPolicy, initial_fraction: f64) -> OracleRun {
    let cap = spec.usable_capacity_kwh;
    let mask = WindowMask::new(policy);
    let per_second_kwh = policy.power_kw / 3600.0;
    let mut soc = initial_fraction * cap;
    let mut run = OracleRun {
        trips: Vec::with_capacity(trips.len()),
        charges: 0,
        charged_kwh: 0.0,
        final_soc_kwh: 0.0,
    };
    for (i, trip) in trips.iter().enumerate() {
        if i > 0 {
            let (from, to) = (trips[i - 1].end.secs(), trip.start.secs());
            let mut stretch = None;
            let mut open: Option<i64> = None;
            for t in from..to {
                if mask.contains(t) {
                    open.get_or_insert(t);
                } else if let Some(s) = open.take() {
                    if t - s >= policy.min_duration_secs {
                        stretch = Some((s, t));
                        break;
                    }
                }
            }
            if stretch.is_none() {
                if let Some(s) = open {
                    if to - s >= policy.min_duration_secs {
                        stretch = Some((s, to));
                    }
                }
            }
            if let Some((s, e)) = stretch {
                if soc / cap < policy.soc_trigger {
                    let mut added = 0.0;
                    for _ in s..e {
                        let step = per_second_kwh.min(cap - soc);
                        if step <= 0.0 {
                            break;
                        }
                        soc += step;
                        added += step;
                    }
                    if added > TOL {
                        run.charges += 1;
                        run.charged_kwh += added;
                    }
                }
            }
        }
        let need = energy_kwh(spec, trip);
        let secs = trip.duration_secs();
        let per = need / secs as f64;
        let before = soc;
        let mut drawn = 0.0;
        let mut feasible = true;
        for _ in 0..secs {
            drawn += per;
            if before - drawn < -TOL {
                feasible = false;
            }
        }
        soc = if feasible { (before - drawn).max(0.0) } else { 0.0 };
        run.trips.push(OracleTrip {
            feasible,
            soc_after_kwh: soc,
        });
    }
    run.final_soc_kwh = soc;
    run
}

/// Cleaned timelines for users `0..n` of `profile`, over `days` days.
pub fn timelines(profile: &GeneratorProfile, n: usize, days: u32) -> Vec<UserTimeline> {
    let mut p = profile.clone();
    p.n_users = n;
    p.horizon_days = days;
    let rules = CleaningRules::default();
    (0..n)
        .map(|i| {
            let u = generate_user(&p, i).expect("preset generates");
            clean_user(u.user_id, u.trips, &rules).into()
        })
        .collect()
}

/// Mixed corpus over all four presets: `per_preset` users each, 12 days.
pub fn oracle_corpus(per_preset: usize) -> Vec<UserTimeline> {
    synthgen::preset_profiles()
        .iter()
        .flat_map(|p| timelines(p, per_preset, 12))
        .filter(|t| !t.trips.is_empty())
        .collect()
}
