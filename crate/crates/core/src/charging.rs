//! Declarative charging policies and the per-parking charge decision.
//!
//! A policy charges at most once per parking event. The state-of-charge
//! trigger is evaluated once, at the instant charging would begin, and a
//! session runs at constant power until the battery is full or the
//! qualifying interval ends.

use alloc::string::String;
use core::fmt;

use chrono::Weekday;

use crate::ingest::ParkingEvent;
use crate::time::{weekday_of_day, TimeOfDay, Timestamp, SECS_PER_DAY, SECS_PER_HOUR, SECS_PER_MINUTE};

/// A set of weekdays, one bit per day starting at Monday.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DaySet(u8);

impl DaySet {
    pub const EMPTY: Self = Self(0);
    pub const ALL: Self = Self(0x7f);
    pub const WEEKDAYS: Self = Self(0x1f);

    pub fn with(self, day: Weekday) -> Self {
        Self(self.0 | 1 << day.num_days_from_monday())
    }

    pub fn contains(self, day: Weekday) -> bool {
        self.0 & (1 << day.num_days_from_monday()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Weekday> {
        let mut day = Weekday::Mon;
        (0..7).filter_map(move |_| {
            let d = day;
            day = day.succ();
            self.contains(d).then_some(d)
        })
    }
}

impl FromIterator<Weekday> for DaySet {
    fn from_iter<I: IntoIterator<Item = Weekday>>(iter: I) -> Self {
        iter.into_iter().fold(Self::EMPTY, DaySet::with)
    }
}

/// A recurring daily time window active on selected weekdays.
///
/// When `end < start` the window crosses midnight; each such instance
/// belongs to the weekday on which it starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeeklyWindow {
    pub days: DaySet,
    pub start: TimeOfDay,
    pub end: TimeOfDay,
}

impl WeeklyWindow {
    pub fn crosses_midnight(&self) -> bool {
        self.end < self.start
    }

    /// Length of one window instance, seconds.
    pub fn instance_secs(&self) -> i64 {
        (self.end.secs() - self.start.secs()).rem_euclid(SECS_PER_DAY)
    }

    /// The instance starting on `day` (days since epoch), if `day` is
    /// selected.
    fn instance_on(&self, day: i64) -> Option<(i64, i64)> {
        if !self.days.contains(weekday_of_day(day)) {
            return None;
        }
        let begin = day * SECS_PER_DAY + self.start.secs();
        Some((begin, begin + self.instance_secs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargeWindow {
    AnyTime,
    Weekly(WeeklyWindow),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargingPolicy {
    pub name: String,
    /// Charger power, kW. May be `f64::INFINITY` for an idealised charger.
    pub power_kw: f64,
    /// Charging is considered only when the SoC fraction is strictly below
    /// this value.
    pub soc_trigger: f64,
    pub min_duration_secs: i64,
    pub window: ChargeWindow,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolicyError {
    #[error("policy `{0}`: power must be positive")]
    Power(String),
    #[error("policy `{0}`: soc_trigger must lie in (0, 1]")]
    Trigger(String),
    #[error("policy `{0}`: min_duration must be positive")]
    Duration(String),
    #[error("policy `{0}`: window start and end must differ and at least one day must be selected")]
    Window(String),
    #[error("no scenario {0}; scenarios are numbered 1 to 4")]
    UnknownScenario(u32),
}

impl ChargingPolicy {
    pub fn validate(&self) -> Result<(), PolicyError> {
        if !(self.power_kw > 0.0) {
            return Err(PolicyError::Power(self.name.clone()));
        }
        if !(self.soc_trigger > 0.0 && self.soc_trigger <= 1.0) {
            return Err(PolicyError::Trigger(self.name.clone()));
        }
        if self.min_duration_secs <= 0 {
            return Err(PolicyError::Duration(self.name.clone()));
        }
        if let ChargeWindow::Weekly(w) = self.window {
            if w.start == w.end || w.days.is_empty() {
                return Err(PolicyError::Window(self.name.clone()));
            }
        }
        Ok(())
    }
}

/// The four reference charging scenarios.
///
/// 1. workplace: Mon–Fri 08:00–20:00, 7.4 kW, SoC < 75 %, ≥ 6 h;
/// 2. low-SoC slow charging: any time, 7.4 kW, SoC < 25 %, ≥ 6 h;
/// 3. overnight at home: every day 20:00–08:00, 7.4 kW, SoC < 75 %, ≥ 6 h;
/// 4. low-SoC fast charging: any time, 50 kW DC, SoC < 25 %, ≥ 20 min.
pub fn scenario(n: u32) -> Result<ChargingPolicy, PolicyError> {
    let hm = |h| TimeOfDay::hm(h, 0).expect("valid hour");
    let (power_kw, soc_trigger, min_duration_secs, window) = match n {
        1 => (
            7.4,
            0.75,
            6 * SECS_PER_HOUR,
            ChargeWindow::Weekly(WeeklyWindow {
                days: DaySet::WEEKDAYS,
                start: hm(8),
                end: hm(20),
            }),
        ),
        2 => (7.4, 0.25, 6 * SECS_PER_HOUR, ChargeWindow::AnyTime),
        3 => (
            7.4,
            0.75,
            6 * SECS_PER_HOUR,
            ChargeWindow::Weekly(WeeklyWindow {
                days: DaySet::ALL,
                start: hm(20),
                end: hm(8),
            }),
        ),
        4 => (50.0, 0.25, 20 * SECS_PER_MINUTE, ChargeWindow::AnyTime),
        other => return Err(PolicyError::UnknownScenario(other)),
    };
    Ok(ChargingPolicy {
        name: alloc::format!("scenario-{n}"),
        power_kw,
        soc_trigger,
        min_duration_secs,
        window,
    })
}

/// Whether, and over which interval, a parked vehicle is plugged in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargeDecision {
    NoCharge,
    Charge { begin: Timestamp, latest_end: Timestamp },
}

impl fmt::Display for ChargeDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoCharge => f.write_str("no charge"),
            Self::Charge { begin, latest_end } => write!(f, "charge {begin}..{latest_end}"),
        }
    }
}

/// The interval during which `policy` may charge within `parking`,
/// ignoring the SoC trigger: the whole parking for any-time policies, or
/// the earliest overlap with a single window instance that lasts at least
/// `min_duration_secs`.
pub fn qualifying_interval(policy: &ChargingPolicy, parking: &ParkingEvent) -> Option<(Timestamp, Timestamp)> {
    let (p_start, p_end) = (parking.start.secs(), parking.end.secs());
    match policy.window {
        ChargeWindow::AnyTime => {
            (p_end - p_start >= policy.min_duration_secs).then_some((parking.start, parking.end))
        }
        ChargeWindow::Weekly(window) => {
            // An instance starting the day before the parking can still be open.
            let first_day = parking.start.day() - 1;
            let last_day = parking.end.day();
            (first_day..=last_day)
                .filter_map(|day| window.instance_on(day))
                .map(|(w_start, w_end)| (w_start.max(p_start), w_end.min(p_end)))
                .find(|&(begin, end)| end - begin >= policy.min_duration_secs)
                .map(|(begin, end)| (Timestamp::from_secs(begin), Timestamp::from_secs(end)))
        }
    }
}

/// Decides whether a parking event yields a charging session, given the
/// SoC fraction at the would-be start (the SoC does not change while
/// parked and not charging).
pub fn charge_decision(policy: &ChargingPolicy, parking: &ParkingEvent, soc_fraction: f64) -> ChargeDecision {
    match qualifying_interval(policy, parking) {
        Some((begin, latest_end)) if soc_fraction < policy.soc_trigger => {
            ChargeDecision::Charge { begin, latest_end }
        }
        _ => ChargeDecision::NoCharge,
    }
}

/// Energy delivered by a charging session and the instant it stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivery {
    pub energy_kwh: f64,
    pub end: Timestamp,
}

/// Charges at constant power from `begin` until full or `latest_end`.
///
/// The stop instant is rounded up to the next whole second and never
/// exceeds `latest_end`.
pub fn charge_delivered(
    policy: &ChargingPolicy,
    begin: Timestamp,
    latest_end: Timestamp,
    soc_kwh: f64,
    capacity_kwh: f64,
) -> Delivery {
    let available_h = (latest_end.secs() - begin.secs()) as f64 / SECS_PER_HOUR as f64;
    let headroom = (capacity_kwh - soc_kwh).max(0.0);
    let energy_kwh = (policy.power_kw * available_h).min(headroom).max(0.0);
    let secs = libm::ceil(energy_kwh / policy.power_kw * SECS_PER_HOUR as f64) as i64;
    Delivery {
        energy_kwh,
        end: begin.add_secs(secs).min(latest_end),
    }
}
