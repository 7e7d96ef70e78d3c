//! Event-driven state-of-charge replay of one user's timeline.
//!
//! Trips and parkings are processed in chronological order. A trip drains
//! its whole energy at once; if the battery holds less than the trip needs,
//! the trip is infeasible and the SoC is clamped to zero, where it stays
//! until the next charging session. Parkings may start one charging session
//! according to the policy.

use alloc::string::String;
use alloc::vec::Vec;

use crate::charging::{charge_decision, charge_delivered, ChargeDecision, ChargingPolicy};
use crate::energy::{trip_energy, VehicleSpec};
use crate::ingest::{derive_parkings, CleanedUser, ParkingEvent, Trip};
use crate::time::Timestamp;

/// Slack for energy comparisons: a trip needing at most `soc + FEASIBILITY_TOL_KWH`
/// is feasible, and sessions delivering no more than this are not recorded.
pub const FEASIBILITY_TOL_KWH: f64 = 1e-9;

/// Bound on the energy-conservation residual of a whole simulation.
pub const CONSERVATION_TOL_KWH: f64 = 1e-6;

/// One user's cleaned trips and the parkings between them.
#[derive(Debug, Clone, PartialEq)]
pub struct UserTimeline {
    pub user_id: String,
    pub trips: Vec<Trip>,
    pub parkings: Vec<ParkingEvent>,
}

impl UserTimeline {
    pub fn from_trips(user_id: String, trips: Vec<Trip>) -> Self {
        let parkings = derive_parkings(&trips);
        Self {
            user_id,
            trips,
            parkings,
        }
    }

    /// Checks that trips and parkings alternate without gaps or overlaps.
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |reason: &'static str| SimError::MalformedTimeline {
            user_id: self.user_id.clone(),
            reason,
        };
        if self.parkings.len() + 1 != self.trips.len() && !(self.trips.is_empty() && self.parkings.is_empty()) {
            return Err(bad("expected exactly one parking between consecutive trips"));
        }
        if self.trips.iter().any(|t| t.end <= t.start) {
            return Err(bad("trip does not end after it starts"));
        }
        for (pair, parking) in self.trips.windows(2).zip(&self.parkings) {
            if parking.start != pair[0].end || parking.end != pair[1].start {
                return Err(bad("parking does not span the gap between its trips"));
            }
            if parking.end < parking.start {
                return Err(bad("trips overlap"));
            }
        }
        Ok(())
    }
}

impl From<CleanedUser> for UserTimeline {
    fn from(user: CleanedUser) -> Self {
        Self::from_trips(user.user_id, user.trips)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("user `{user_id}`: malformed timeline: {reason}")]
    MalformedTimeline { user_id: String, reason: &'static str },
    #[error("initial SoC fraction must lie in [0, 1]")]
    InitialSoc,
}

/// Battery state of charge in kWh, kept within `[0, capacity]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocState {
    pub soc_kwh: f64,
    pub capacity_kwh: f64,
}

impl SocState {
    pub fn fraction(&self) -> f64 {
        self.soc_kwh / self.capacity_kwh
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripOutcome {
    pub index: usize,
    pub start: Timestamp,
    pub energy_required_kwh: f64,
    pub soc_before_kwh: f64,
    pub soc_after_kwh: f64,
    pub feasible: bool,
}

/// A charging session that delivered a positive amount of energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargeEvent {
    pub begin: Timestamp,
    pub end: Timestamp,
    pub energy_kwh: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub user_id: String,
    pub vehicle: String,
    pub policy: String,
    pub capacity_kwh: f64,
    pub trips: Vec<TripOutcome>,
    pub charges: Vec<ChargeEvent>,
    pub initial_soc_kwh: f64,
    pub final_soc_kwh: f64,
}

impl SimulationResult {
    pub fn feasible_trips(&self) -> usize {
        self.trips.iter().filter(|t| t.feasible).count()
    }

    /// `final - (initial + charged - driven - discarded)`, where the
    /// discarded energy is what each infeasible trip's clamp threw away.
    pub fn conservation_residual(&self) -> f64 {
        let charged: f64 = self.charges.iter().map(|c| c.energy_kwh).sum();
        let drained: f64 = self
            .trips
            .iter()
            .map(|t| if t.feasible { t.energy_required_kwh } else { t.soc_before_kwh })
            .sum();
        self.final_soc_kwh - (self.initial_soc_kwh + charged - drained)
    }
}

/// Replays `timeline` for one vehicle under one charging policy, starting
/// with the battery at `initial_soc_fraction` of its usable capacity.
pub fn simulate_user(
    timeline: &UserTimeline,
    spec: &VehicleSpec,
    policy: &ChargingPolicy,
    initial_soc_fraction: f64,
) -> Result<SimulationResult, SimError> {
    if !(0.0..=1.0).contains(&initial_soc_fraction) {
        return Err(SimError::InitialSoc);
    }
    timeline.validate()?;

    let capacity = spec.usable_capacity_kwh;
    let initial = capacity * initial_soc_fraction;
    let mut soc = initial;
    let mut trips = Vec::with_capacity(timeline.trips.len());
    let mut charges = Vec::new();

    for (index, trip) in timeline.trips.iter().enumerate() {
        if index > 0 {
            let parking = &timeline.parkings[index - 1];
            if let ChargeDecision::Charge { begin, latest_end } = charge_decision(policy, parking, soc / capacity) {
                let delivery = charge_delivered(policy, begin, latest_end, soc, capacity);
                if delivery.energy_kwh > FEASIBILITY_TOL_KWH {
                    soc = (soc + delivery.energy_kwh).min(capacity);
                    charges.push(ChargeEvent {
                        begin,
                        end: delivery.end,
                        energy_kwh: delivery.energy_kwh,
                    });
                }
            }
        }

        let energy = trip_energy(spec, trip);
        let before = soc;
        let feasible = energy <= soc + FEASIBILITY_TOL_KWH;
        soc = if feasible { (soc - energy).max(0.0) } else { 0.0 };
        trips.push(TripOutcome {
            index,
            start: trip.start,
            energy_required_kwh: energy,
            soc_before_kwh: before,
            soc_after_kwh: soc,
            feasible,
        });
    }

    Ok(SimulationResult {
        user_id: timeline.user_id.clone(),
        vehicle: spec.name.clone(),
        policy: policy.name.clone(),
        capacity_kwh: capacity,
        trips,
        charges,
        initial_soc_kwh: initial,
        final_soc_kwh: soc,
    })
}

/// Every user × vehicle × policy combination, sequentially, ordered by
/// user, then vehicle, then policy. A failing user does not stop the others.
pub fn simulate_matrix(
    users: &[UserTimeline],
    specs: &[VehicleSpec],
    policies: &[ChargingPolicy],
    initial_soc_fraction: f64,
) -> Vec<Result<SimulationResult, SimError>> {
    let mut out = Vec::with_capacity(users.len() * specs.len() * policies.len());
    for user in users {
        for spec in specs {
            for policy in policies {
                out.push(simulate_user(user, spec, policy, initial_soc_fraction));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charging::{scenario, ChargeWindow};
    use crate::energy::{builtin_vehicle, builtin_vehicles};
    use alloc::vec;

    fn ts(s: &str) -> Timestamp {
        Timestamp::parse(s).unwrap()
    }

    fn highway(start: &str, end: &str, km: f64) -> Trip {
        Trip {
            start: ts(start),
            end: ts(end),
            km_urban: 0.0,
            km_extraurban: 0.0,
            km_highway: km,
        }
    }

    fn never_charge() -> ChargingPolicy {
        ChargingPolicy {
            name: "never".into(),
            power_kw: 7.4,
            soc_trigger: 1e-12,
            min_duration_secs: i64::MAX,
            window: ChargeWindow::AnyTime,
        }
    }

    #[test]
    fn fiat_overnight_golden_trace() {
        let fiat = builtin_vehicle("Fiat 500e").unwrap();
        let s3 = scenario(3).unwrap();
        let timeline = UserTimeline::from_trips(
            "u1".into(),
            vec![
                highway("2024-03-05T18:00:00", "2024-03-05T19:00:00", 50.0),
                highway("2024-03-06T09:00:00", "2024-03-06T10:30:00", 135.0),
            ],
        );
        let r = simulate_user(&timeline, &fiat, &s3, 1.0).unwrap();
        assert_eq!(r.trips.len(), 2);
        assert!((r.trips[0].energy_required_kwh - 8.5).abs() < 1e-9);
        assert!((r.trips[0].soc_before_kwh - 21.3).abs() < 1e-9);
        assert!((r.trips[0].soc_after_kwh - 12.8).abs() < 1e-9);
        assert!(r.trips[0].feasible);
        assert_eq!(r.charges.len(), 1);
        assert_eq!(r.charges[0].begin, ts("2024-03-05T20:00:00"));
        assert!((r.charges[0].energy_kwh - 8.5).abs() < 1e-9);
        assert!((r.trips[1].soc_before_kwh - 21.3).abs() < 1e-9);
        assert!((r.trips[1].energy_required_kwh - 22.95).abs() < 1e-9);
        assert!(!r.trips[1].feasible);
        assert_eq!(r.trips[1].soc_after_kwh, 0.0);
        assert_eq!(r.final_soc_kwh, 0.0);
        assert!(r.conservation_residual().abs() < CONSERVATION_TOL_KWH);
    }

    #[test]
    fn pure_discharge_is_feasible_and_decreasing() {
        let fiat = builtin_vehicle("Fiat 500e").unwrap();
        let timeline = UserTimeline::from_trips(
            "u".into(),
            vec![
                highway("2024-03-05T08:00:00", "2024-03-05T09:00:00", 30.0),
                highway("2024-03-05T12:00:00", "2024-03-05T13:00:00", 30.0),
                highway("2024-03-05T17:00:00", "2024-03-05T18:00:00", 30.0),
            ],
        );
        let r = simulate_user(&timeline, &fiat, &never_charge(), 1.0).unwrap();
        assert!(r.trips.iter().all(|t| t.feasible));
        assert!(r.trips.windows(2).all(|w| w[1].soc_after_kwh < w[0].soc_after_kwh));
        assert!(r.charges.is_empty());
    }

    #[test]
    fn empty_timeline() {
        let fiat = builtin_vehicle("Fiat 500e").unwrap();
        let timeline = UserTimeline::from_trips("u".into(), vec![]);
        let r = simulate_user(&timeline, &fiat, &scenario(1).unwrap(), 0.5).unwrap();
        assert!(r.trips.is_empty() && r.charges.is_empty());
        assert_eq!(r.final_soc_kwh, r.initial_soc_kwh);
    }

    #[test]
    fn exact_energy_is_feasible() {
        let fiat = builtin_vehicle("Fiat 500e").unwrap();
        // 21.3 kWh / 170 Wh/km
        let km = 21.3 / 0.170;
        let timeline =
            UserTimeline::from_trips("u".into(), vec![highway("2024-03-05T08:00:00", "2024-03-05T10:00:00", km)]);
        let r = simulate_user(&timeline, &fiat, &never_charge(), 1.0).unwrap();
        assert!(r.trips[0].feasible);
        assert!(r.trips[0].soc_after_kwh.abs() < 1e-9);
    }

    #[test]
    fn infeasible_trip_drains_to_zero_until_charge() {
        let fiat = builtin_vehicle("Fiat 500e").unwrap();
        let timeline = UserTimeline::from_trips(
            "u".into(),
            vec![
                highway("2024-03-05T08:00:00", "2024-03-05T10:00:00", 150.0),
                highway("2024-03-05T11:00:00", "2024-03-05T11:30:00", 10.0),
                highway("2024-03-05T12:00:00", "2024-03-05T12:01:00", 0.0),
            ],
        );
        let r = simulate_user(&timeline, &fiat, &never_charge(), 1.0).unwrap();
        assert_eq!(
            r.trips.iter().map(|t| t.feasible).collect::<Vec<_>>(),
            [false, false, true]
        );
        assert!(r.trips.iter().all(|t| t.soc_after_kwh == 0.0));
        assert!(r.conservation_residual().abs() < CONSERVATION_TOL_KWH);
    }

    #[test]
    fn malformed_timeline_names_user() {
        let fiat = builtin_vehicle("Fiat 500e").unwrap();
        let mut timeline = UserTimeline::from_trips(
            "ghost".into(),
            vec![
                highway("2024-03-05T08:00:00", "2024-03-05T09:00:00", 10.0),
                highway("2024-03-05T10:00:00", "2024-03-05T11:00:00", 10.0),
            ],
        );
        timeline.parkings.clear();
        let err = simulate_user(&timeline, &fiat, &scenario(2).unwrap(), 1.0).unwrap_err();
        assert!(matches!(err, SimError::MalformedTimeline { ref user_id, .. } if user_id == "ghost"));
        assert_eq!(
            simulate_user(&UserTimeline::from_trips("x".into(), vec![]), &fiat, &scenario(2).unwrap(), 1.5),
            Err(SimError::InitialSoc)
        );
    }

    #[test]
    fn matrix_cardinality_and_order() {
        let users: Vec<UserTimeline> = ["a", "b"]
            .iter()
            .map(|u| {
                UserTimeline::from_trips(
                    (*u).into(),
                    vec![highway("2024-03-05T08:00:00", "2024-03-05T09:00:00", 40.0)],
                )
            })
            .collect();
        let specs = builtin_vehicles();
        let policies: Vec<_> = (1..=4).map(|n| scenario(n).unwrap()).collect();
        let results = simulate_matrix(&users, &specs, &policies, 1.0);
        assert_eq!(results.len(), 32);
        let first = results[0].as_ref().unwrap();
        assert_eq!((first.user_id.as_str(), first.vehicle.as_str(), first.policy.as_str()), ("a", "Fiat 500e", "scenario-1"));
        let last = results[31].as_ref().unwrap();
        assert_eq!((last.user_id.as_str(), last.policy.as_str()), ("b", "scenario-4"));
        assert_eq!(results, simulate_matrix(&users, &specs, &policies, 1.0));
    }
}
