//! Vehicle specifications and per-trip energy use.

use alloc::string::String;
use alloc::vec::Vec;

use crate::ingest::Trip;

/// A battery electric vehicle: usable capacity plus per-road-category
/// consumption rates.
///
/// The three rates are independent data; no ordering between urban,
/// combined and highway consumption is assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleSpec {
    pub name: String,
    pub usable_capacity_kwh: f64,
    pub rate_urban_wh_per_km: f64,
    pub rate_highway_wh_per_km: f64,
    pub rate_combined_wh_per_km: f64,
    /// Informational only; never used by the simulation.
    pub estimated_range_km: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VehicleError {
    #[error("vehicle `{0}`: usable capacity must be positive and finite")]
    Capacity(String),
    #[error("vehicle `{0}`: consumption rates must be positive and finite")]
    Rate(String),
}

impl VehicleSpec {
    pub fn new(
        name: impl Into<String>,
        usable_capacity_kwh: f64,
        rate_urban_wh_per_km: f64,
        rate_highway_wh_per_km: f64,
        rate_combined_wh_per_km: f64,
        estimated_range_km: f64,
    ) -> Result<Self, VehicleError> {
        let spec = Self {
            name: name.into(),
            usable_capacity_kwh,
            rate_urban_wh_per_km,
            rate_highway_wh_per_km,
            rate_combined_wh_per_km,
            estimated_range_km,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), VehicleError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.usable_capacity_kwh) {
            return Err(VehicleError::Capacity(self.name.clone()));
        }
        if ![
            self.rate_urban_wh_per_km,
            self.rate_highway_wh_per_km,
            self.rate_combined_wh_per_km,
        ]
        .into_iter()
        .all(positive)
        {
            return Err(VehicleError::Rate(self.name.clone()));
        }
        Ok(())
    }

    /// Extra-urban driving is charged at the combined rate.
    pub fn rate_extraurban_wh_per_km(&self) -> f64 {
        self.rate_combined_wh_per_km
    }

    /// Energy in kWh needed to drive `trip`.
    pub fn trip_energy_kwh(&self, trip: &Trip) -> f64 {
        trip_energy(self, trip)
    }
}

/// Energy in kWh needed to drive `trip` with `spec`, summing each road
/// category's distance times its consumption rate.
pub fn trip_energy(spec: &VehicleSpec, trip: &Trip) -> f64 {
    (trip.km_urban * spec.rate_urban_wh_per_km
        + trip.km_extraurban * spec.rate_extraurban_wh_per_km()
        + trip.km_highway * spec.rate_highway_wh_per_km)
        / 1000.0
}

/// The four reference models with their usable capacity (kWh), estimated
/// range (km) and urban/highway/combined consumption (Wh/km).
const BUILTIN: [(&str, f64, f64, f64, f64, f64); 4] = [
    ("Fiat 500e", 21.3, 135.0, 101.0, 170.0, 133.0),
    ("Renault Megane E-Tech", 40.0, 260.0, 103.0, 167.0, 133.0),
    ("Tesla Model 3", 57.5, 420.0, 93.0, 142.0, 116.0),
    ("Audi A6 e-tron", 94.9, 610.0, 109.0, 161.0, 134.0),
];

pub fn builtin_vehicles() -> Vec<VehicleSpec> {
    BUILTIN
        .iter()
        .map(|&(name, capacity, range, urban, highway, combined)| VehicleSpec {
            name: name.into(),
            usable_capacity_kwh: capacity,
            rate_urban_wh_per_km: urban,
            rate_highway_wh_per_km: highway,
            rate_combined_wh_per_km: combined,
            estimated_range_km: range,
        })
        .collect()
}

/// Looks up a built-in model by exact name.
pub fn builtin_vehicle(name: &str) -> Option<VehicleSpec> {
    builtin_vehicles().into_iter().find(|v| v.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::Timestamp;

    fn trip(urban: f64, extra: f64, highway: f64) -> Trip {
        Trip {
            start: Timestamp::from_secs(0),
            end: Timestamp::from_secs(3600),
            km_urban: urban,
            km_extraurban: extra,
            km_highway: highway,
        }
    }

    #[test]
    fn builtins_validate() {
        let all = builtin_vehicles();
        assert_eq!(all.len(), 4);
        assert!(all.iter().all(|v| v.validate().is_ok()));
    }

    #[test]
    fn lookups() {
        assert_eq!(builtin_vehicle("Fiat 500e").unwrap().usable_capacity_kwh, 21.3);
        assert_eq!(builtin_vehicle("Tesla Model 3").unwrap().rate_highway_wh_per_km, 142.0);
        assert_eq!(builtin_vehicle("Audi A6 e-tron").unwrap().rate_combined_wh_per_km, 134.0);
        assert!(builtin_vehicle("Trabant").is_none());
    }

    #[test]
    fn energy_examples() {
        let tesla = builtin_vehicle("Tesla Model 3").unwrap();
        assert!((trip_energy(&tesla, &trip(0.0, 0.0, 100.0)) - 14.2).abs() < 1e-9);
        assert_eq!(trip_energy(&tesla, &trip(0.0, 0.0, 0.0)), 0.0);
        let fiat = builtin_vehicle("Fiat 500e").unwrap();
        assert!((trip_energy(&fiat, &trip(10.0, 20.0, 30.0)) - 8.77).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_positive() {
        assert_eq!(
            VehicleSpec::new("x", 0.0, 1.0, 1.0, 1.0, 0.0),
            Err(VehicleError::Capacity("x".into()))
        );
        assert_eq!(
            VehicleSpec::new("x", 10.0, 1.0, -1.0, 1.0, 0.0),
            Err(VehicleError::Rate("x".into()))
        );
        assert_eq!(
            VehicleSpec::new("x", 10.0, 1.0, f64::NAN, 1.0, 0.0),
            Err(VehicleError::Rate("x".into()))
        );
    }
}
