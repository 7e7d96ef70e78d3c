//! Replay of recorded combustion-engine trip logs against battery electric
//! vehicle models and charging policies.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. The
//! `evreplay` crate wraps it with CSV readers/writers, configuration files
//! and a command-line interface.

#![no_std]

extern crate alloc;

pub mod charging;
pub mod energy;
pub mod ingest;
pub mod metrics;
pub mod sim;
pub mod synthgen;
pub mod time;

pub use charging::{scenario, ChargeDecision, ChargeWindow, ChargingPolicy, DaySet, WeeklyWindow};
pub use energy::{builtin_vehicles, trip_energy, VehicleSpec};
pub use ingest::{CleaningReport, CleaningRules, ParkingEvent, Trip, TripRecord};
pub use metrics::{DistributionSummary, UserCharacterization, UserMetrics};
pub use sim::{simulate_user, SimulationResult, UserTimeline};
pub use synthgen::GeneratorProfile;
pub use time::{TimeOfDay, Timestamp};
