//! Civil (zone-less) timestamps at one-second resolution.
//!
//! Timestamps are the naive seconds elapsed since `1970-01-01T00:00:00` on
//! the local wall clock. There is no DST or time-zone handling: every day
//! is exactly 86 400 s long.

use core::fmt;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Weekday};

pub const SECS_PER_MINUTE: i64 = 60;
pub const SECS_PER_HOUR: i64 = 3_600;
pub const SECS_PER_DAY: i64 = 86_400;

const ISO_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

/// A civil-clock instant, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

impl Timestamp {
    pub const fn from_secs(secs: i64) -> Self {
        Self(secs)
    }

    pub const fn secs(self) -> i64 {
        self.0
    }

    /// Parses `YYYY-MM-DDTHH:MM:SS`.
    pub fn parse(s: &str) -> Option<Self> {
        NaiveDateTime::parse_from_str(s, ISO_FORMAT)
            .ok()
            .map(|dt| Self(dt.and_utc().timestamp()))
    }

    pub fn from_civil(year: i32, month: u32, day: u32, hour: u32, min: u32, sec: u32) -> Option<Self> {
        NaiveDate::from_ymd_opt(year, month, day)
            .and_then(|d| d.and_hms_opt(hour, min, sec))
            .map(|dt| Self(dt.and_utc().timestamp()))
    }

    /// Calendar day index (days since 1970-01-01).
    pub const fn day(self) -> i64 {
        self.0.div_euclid(SECS_PER_DAY)
    }

    /// Seconds since local midnight.
    pub const fn time_of_day(self) -> i64 {
        self.0.rem_euclid(SECS_PER_DAY)
    }

    pub const fn weekday(self) -> Weekday {
        weekday_of_day(self.day())
    }

    pub const fn add_secs(self, secs: i64) -> Self {
        Self(self.0 + secs)
    }

    pub fn date(self) -> NaiveDate {
        self.naive().date()
    }

    fn naive(self) -> NaiveDateTime {
        DateTime::from_timestamp(self.0, 0)
            .map(|dt| dt.naive_utc())
            .unwrap_or(NaiveDateTime::MIN)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.naive().format(ISO_FORMAT))
    }
}

/// Weekday of a day index. Day 0 (1970-01-01) was a Thursday.
pub const fn weekday_of_day(day: i64) -> Weekday {
    match (day + 3).rem_euclid(7) {
        0 => Weekday::Mon,
        1 => Weekday::Tue,
        2 => Weekday::Wed,
        3 => Weekday::Thu,
        4 => Weekday::Fri,
        5 => Weekday::Sat,
        _ => Weekday::Sun,
    }
}

/// A time of day in seconds since midnight, `0..86_400`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeOfDay(u32);

impl TimeOfDay {
    pub const MIDNIGHT: Self = Self(0);

    pub const fn hm(hour: u32, minute: u32) -> Option<Self> {
        if hour < 24 && minute < 60 {
            Some(Self(hour * 3600 + minute * 60))
        } else {
            None
        }
    }

    pub const fn from_secs(secs: u32) -> Option<Self> {
        if secs < SECS_PER_DAY as u32 {
            Some(Self(secs))
        } else {
            None
        }
    }

    /// Parses `HH:MM`.
    pub fn parse_hm(s: &str) -> Option<Self> {
        let (h, m) = s.split_once(':')?;
        if h.len() != 2 || m.len() != 2 {
            return None;
        }
        Self::hm(h.parse().ok()?, m.parse().ok()?)
    }

    pub const fn secs(self) -> i64 {
        self.0 as i64
    }
}

impl fmt::Display for TimeOfDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}", self.0 / 3600, (self.0 / 60) % 60)
    }
}
