//! Run configuration (TOML) and its resolution into engine types.

use std::path::{Path, PathBuf};

use evreplay_core::charging::{scenario, ChargeWindow, ChargingPolicy, DaySet, WeeklyWindow};
use evreplay_core::energy::{builtin_vehicles, VehicleSpec};
use evreplay_core::synthgen::{self, GeneratorProfile};
use evreplay_core::time::{TimeOfDay, SECS_PER_MINUTE};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_BINS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Inputs {
    One(PathBuf),
    Many(Vec<PathBuf>),
}

impl Inputs {
    pub fn paths(&self) -> Vec<PathBuf> {
        match self {
            Inputs::One(p) => vec![p.clone()],
            Inputs::Many(ps) => ps.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleConfig {
    pub name: String,
    pub usable_capacity_kwh: f64,
    pub rate_urban_wh_per_km: f64,
    pub rate_highway_wh_per_km: f64,
    pub rate_combined_wh_per_km: f64,
    /// Defaults to capacity over the combined rate.
    #[serde(default)]
    pub estimated_range_km: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowConfig {
    Keyword(String),
    Weekly { days: Vec<String>, start: String, end: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    pub name: String,
    pub power_kw: f64,
    pub soc_trigger: f64,
    pub min_duration_minutes: f64,
    pub window: WindowConfig,
}

/// Everything a run needs. Every field is optional in the file; CLI flags
/// fill or override them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: Option<Inputs>,
    pub output: Option<PathBuf>,
    /// Vehicle names, built-in or declared under `[[vehicle]]`. Empty
    /// means every built-in plus every custom vehicle.
    pub vehicles: Vec<String>,
    /// Scenario numbers 1-4. Absent means all four.
    pub scenarios: Option<Vec<u32>>,
    #[serde(rename = "vehicle")]
    pub custom_vehicles: Vec<VehicleConfig>,
    #[serde(rename = "policy")]
    pub custom_policies: Vec<PolicyConfig>,
    pub initial_soc: Option<f64>,
    pub observation_days: Option<f64>,
    pub bins: Option<usize>,
    pub trace: bool,
    pub jobs: Option<usize>,
    /// Synthetic profile name or file, for `synth`.
    pub profile: Option<String>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => CliError::usage(format!("config file {} not found", path.display())),
            _ => CliError::io(path, e),
        })?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn inputs(&self) -> Vec<PathBuf> {
        self.input.as_ref().map(Inputs::paths).unwrap_or_default()
    }

    pub fn bins(&self) -> usize {
        self.bins.unwrap_or(DEFAULT_BINS)
    }

    pub fn initial_soc(&self) -> f64 {
        self.initial_soc.unwrap_or(1.0)
    }

    /// Checks the scalar settings that do not depend on vehicles or policies.
    pub fn validate(&self) -> Result<()> {
        let soc = self.initial_soc();
        if !(0.0..=1.0).contains(&soc) {
            return Err(CliError::usage(format!("initial_soc must be in [0, 1], got {soc}")));
        }
        if let Some(days) = self.observation_days {
            if !(days.is_finite() && days > 0.0) {
                return Err(CliError::usage(format!("observation_days must be positive, got {days}")));
            }
        }
        if self.bins() == 0 {
            return Err(CliError::usage("bins must be at least 1"));
        }
        if self.jobs == Some(0) {
            return Err(CliError::usage("jobs must be at least 1"));
        }
        Ok(())
    }

    /// Vehicles in the configured order.
    pub fn resolve_vehicles(&self) -> Result<Vec<VehicleSpec>> {
        let mut custom = Vec::new();
        for v in &self.custom_vehicles {
            let spec = VehicleSpec::new(
                &v.name,
                v.usable_capacity_kwh,
                v.rate_urban_wh_per_km,
                v.rate_highway_wh_per_km,
                v.rate_combined_wh_per_km,
                v.estimated_range_km
                    .unwrap_or(v.usable_capacity_kwh * 1000.0 / v.rate_combined_wh_per_km),
            )
            .map_err(|e| CliError::usage(format!("vehicle `{}`: {e}", v.name)))?;
            custom.push(spec);
        }
        let builtin = builtin_vehicles();
        let specs: Vec<VehicleSpec> = if self.vehicles.is_empty() {
            builtin.into_iter().chain(custom).collect()
        } else {
            self.vehicles
                .iter()
                .map(|name| {
                    custom
                        .iter()
                        .chain(&builtin)
                        .find(|s| s.name == *name)
                        .cloned()
                        .ok_or_else(|| CliError::usage(format!("unknown vehicle `{name}`")))
                })
                .collect::<Result<_>>()?
        };
        reject_duplicates(specs.iter().map(|s| s.name.as_str()), "vehicle")?;
        Ok(specs)
    }

    /// Scenario policies first, then custom ones.
    pub fn resolve_policies(&self) -> Result<Vec<ChargingPolicy>> {
        let numbers = self.scenarios.clone().unwrap_or_else(|| vec![1, 2, 3, 4]);
        let mut out = Vec::new();
        for n in numbers {
            out.push(scenario(n).map_err(|e| CliError::usage(e.to_string()))?);
        }
        for p in &self.custom_policies {
            out.push(p.resolve()?);
        }
        if out.is_empty() {
            return Err(CliError::usage("no charging policies selected"));
        }
        reject_duplicates(out.iter().map(|p| p.name.as_str()), "policy")?;
        Ok(out)
    }
}

fn reject_duplicates<'a>(names: impl Iterator<Item = &'a str>, what: &str) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for name in names {
        if !seen.insert(name) {
            return Err(CliError::usage(format!("{what} `{name}` listed twice")));
        }
    }
    Ok(())
}

impl PolicyConfig {
    pub fn resolve(&self) -> Result<ChargingPolicy> {
        let bad = |msg: String| CliError::usage(format!("policy `{}`: {msg}", self.name));
        let window = match &self.window {
            WindowConfig::Keyword(k) if k == "any" => ChargeWindow::AnyTime,
            WindowConfig::Keyword(k) => return Err(bad(format!("unknown window `{k}`"))),
            WindowConfig::Weekly { days, start, end } => {
                let mut set = DaySet::EMPTY;
                for d in days {
                    let day: chrono::Weekday = d.parse().map_err(|_| bad(format!("unknown day `{d}`")))?;
                    set = set.with(day);
                }
                let parse = |s: &str| TimeOfDay::parse_hm(s).ok_or_else(|| bad(format!("bad time `{s}`, expected HH:MM")));
                ChargeWindow::Weekly(WeeklyWindow {
                    days: set,
                    start: parse(start)?,
                    end: parse(end)?,
                })
            }
        };
        let minutes = self.min_duration_minutes;
        if !(minutes.is_finite() && minutes >= 0.0) {
            return Err(bad(format!("min_duration_minutes must be non-negative, got {minutes}")));
        }
        let policy = ChargingPolicy {
            name: self.name.clone(),
            power_kw: self.power_kw,
            soc_trigger: self.soc_trigger,
            min_duration_secs: (minutes * SECS_PER_MINUTE as f64).round() as i64,
            window,
        };
        policy.validate().map_err(|e| bad(e.to_string()))?;
        Ok(policy)
    }
}

/// A preset name or a path to a TOML profile. TOML profiles start from
/// the mixed-fleet defaults.
pub fn load_profile(spec: &str) -> Result<GeneratorProfile> {
    let normalized = spec.replace('_', "-");
    if let Some(p) = synthgen::preset(&normalized) {
        return Ok(p);
    }
    let path = Path::new(spec);
    if path.extension().is_some_and(|e| e == "toml") {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => CliError::usage(format!("unknown profile `{spec}`: file not found")),
            _ => CliError::io(path, e),
        })?;
        let profile: GeneratorProfile =
            toml::from_str(&text).map_err(|e| CliError::usage(format!("invalid profile {spec}: {e}")))?;
        profile.validate().map_err(|e| CliError::usage(e.to_string()))?;
        return Ok(profile);
    }
    let known: Vec<String> = synthgen::preset_profiles().into_iter().map(|p| p.name).collect();
    Err(CliError::usage(format!("unknown profile `{spec}` (presets: {})", known.join(", "))))
}
