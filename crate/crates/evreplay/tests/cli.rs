//! End-to-end runs of the `evreplay` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use evreplay_core::synthgen;

const HEADER: &str = "user_id,start_ts,end_ts,km_urban,km_extraurban,km_highway\n";

fn evreplay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evreplay"))
        .args(args)
        .env_remove("EVREPLAY_OUTPUT")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

fn synth(dir: &Path, profile: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(format!("synth-{profile}"));
    let mut args = vec!["synth", "--profile", profile, "--output", p(&out)];
    args.extend(extra);
    let run = evreplay(&args);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    out.join("trips.csv")
}

#[test]
fn synth_writes_log_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let trips = synth(dir.path(), "commuter", &["--users", "5", "--days", "10"]);
    let text = fs::read_to_string(&trips).unwrap();
    assert!(text.starts_with(HEADER));
    let m = manifest(trips.parent().unwrap());
    assert_eq!(m["command"], "synth");
    assert_eq!(m["counts"]["users"], 5);
    assert_eq!(m["config"]["profile"]["name"], "commuter");
    assert_eq!(m["outputs"][0]["path"], "trips.csv");
}

#[test]
fn synth_same_seed_same_digest() {
    let dir = tempfile::tempdir().unwrap();
    let digest = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        let run = evreplay(&["synth", "--profile", "mixed-fleet", "--users", "20", "--days", "30", "--seed", seed, "--output", p(&out)]);
        assert_eq!(code(&run), 0);
        manifest(&out)["outputs"][0]["sha256"].as_str().unwrap().to_string()
    };
    assert_eq!(digest("a", "11"), digest("b", "11"));
    assert_ne!(digest("a", "11"), digest("c", "12"));
}

#[test]
fn synth_zero_users_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let trips = synth(dir.path(), "mixed-fleet", &["--users", "0"]);
    assert_eq!(fs::read_to_string(trips).unwrap(), HEADER);
}

#[test]
fn synth_unknown_profile() {
    let dir = tempfile::tempdir().unwrap();
    let run = evreplay(&["synth", "--profile", "weekend-warrior", "--output", p(dir.path())]);
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("unknown profile"));
}

#[test]
fn clean_recovers_injected_counts_and_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let raw = synth(dir.path(), "dirty-data", &[]);
    let first = dir.path().join("clean1");
    assert_eq!(code(&evreplay(&["clean", "--input", p(&raw), "--output", p(&first)])), 0);

    let report: serde_json::Value = serde_json::from_slice(&fs::read(first.join("cleaning_report.json")).unwrap()).unwrap();
    let inject = synthgen::dirty_data().inject;
    let expect = [
        ("short_parking_merges", inject.short_parking),
        ("too_short", inject.too_short),
        ("too_long", inject.too_long),
        ("too_near", inject.too_near),
        ("too_far", inject.too_far),
        ("too_slow", inject.too_slow),
        ("too_fast", inject.too_fast),
        ("overlapping", inject.overlapping),
        ("malformed", inject.malformed),
    ];
    for (key, n) in expect {
        assert_eq!(report[key], u64::from(n), "{key}");
    }
    assert_eq!(report["diagnostics"].as_array().unwrap().len(), inject.malformed as usize);

    let second = dir.path().join("clean2");
    let cleaned = first.join("cleaned.csv");
    assert_eq!(code(&evreplay(&["clean", "--input", p(&cleaned), "--output", p(&second)])), 0);
    assert_eq!(fs::read(&cleaned).unwrap(), fs::read(second.join("cleaned.csv")).unwrap());
    let again: serde_json::Value = serde_json::from_slice(&fs::read(second.join("cleaning_report.json")).unwrap()).unwrap();
    assert_eq!(again["input"], again["retained"]);
}

#[test]
fn clean_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let run = evreplay(&["clean", "--input", p(&dir.path().join("nope.csv")), "--output", p(&out)]);
    assert_eq!(code(&run), 2);

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "who,when\nx,y\n").unwrap();
    let run = evreplay(&["clean", "--input", p(&bad), "--output", p(&out)]);
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("header"));

    let run = evreplay(&["clean", "--output", p(&out)]);
    assert_eq!(code(&run), 2);

    let run = evreplay(&["clean", "--bogus"]);
    assert_eq!(code(&run), 2);
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("t.csv");
    fs::write(&input, format!("{HEADER}a,2024-03-04T08:00:00,2024-03-04T09:00:00,30,0,0\n")).unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let run = evreplay(&["clean", "--input", p(&input), "--output", p(&blocker)]);
    assert_eq!(code(&run), 3, "{}", stderr(&run));
}

#[test]
fn characterize_hand_computed_user() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("t.csv");
    fs::write(
        &input,
        format!(
            "{HEADER}a,2024-03-04T08:00:00,2024-03-04T09:00:00,30,0,0\n\
             a,2024-03-04T17:00:00,2024-03-04T18:00:00,20,0,0\n\
             a,2024-03-05T10:00:00,2024-03-05T10:30:00,10,0,0\n"
        ),
    )
    .unwrap();
    let out = dir.path().join("out");
    let run = evreplay(&["characterize", "--input", p(&input), "--output", p(&out), "--bins", "4"]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let text = fs::read_to_string(out.join("characterization.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "user_id,active_days,avg_daily_trips,avg_daily_distance_km,utilization_pct"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[..4], ["a", "2", "1.5", "30"]);
    let util: f64 = row[4].parse().unwrap();
    // Two hours on the first day, half an hour on the second.
    assert!((util - (200.0 / 24.0 + 50.0 / 24.0) / 2.0).abs() < 1e-12);
    assert!(out.join("characterization_summary.csv").is_file());
    // A single user gives a zero-width range: one bin holding all the mass.
    let hist = fs::read_to_string(out.join("distributions/utilization_pct.csv")).unwrap();
    let bins: Vec<&str> = hist.lines().skip(1).collect();
    assert_eq!(bins.len(), 1);
    assert!(bins[0].ends_with(",1,1"));
}

#[test]
fn characterize_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("t.csv");
    fs::write(&input, HEADER).unwrap();
    let run = evreplay(&["characterize", "--input", p(&input), "--output", p(&dir.path().join("o"))]);
    assert_eq!(code(&run), 1);
    assert!(stderr(&run).contains("no users"));
}

#[test]
fn simulate_commuter_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let trips = synth(dir.path(), "commuter", &["--users", "12", "--days", "21"]);
    let out = dir.path().join("sim");
    let run = evreplay(&["simulate", "--input", p(&trips), "--output", p(&out), "--trace", "--jobs", "2"]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let matrix = fs::read_to_string(out.join("matrix.csv")).unwrap();
    assert_eq!(matrix.lines().count(), 17);
    let metrics = fs::read_to_string(out.join("user_metrics.csv")).unwrap();
    assert_eq!(
        metrics.lines().next().unwrap(),
        "user_id,vehicle,policy,feasible_trip_pct,monthly_charges,avg_soc_after_trip_pct,suitable"
    );
    assert_eq!(metrics.lines().count(), 1 + 12 * 16);
    let trace = fs::read_to_string(out.join("trace/scenario-3__Fiat_500e.csv")).unwrap();
    assert_eq!(
        trace.lines().next().unwrap(),
        "user_id,trip_index,start_ts,energy_kwh,soc_before_kwh,soc_after_kwh,feasible"
    );
    assert!(out.join("distributions/feasible_trip_pct__scenario-3__Fiat_500e.csv").is_file());
    assert_eq!(manifest(&out)["counts"]["simulations"], 12 * 16);
}

#[test]
fn simulate_unknown_vehicle_fails_before_reading_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sim");
    // The input does not exist either; the vehicle check must come first.
    let run = evreplay(&["simulate", "--input", "missing.csv", "--vehicles", "Trabant", "--output", p(&out)]);
    assert_eq!(code(&run), 2);
    assert!(stderr(&run).contains("unknown vehicle"));
    assert!(!out.exists());
}

#[test]
fn simulate_from_config_with_custom_models() {
    let dir = tempfile::tempdir().unwrap();
    let trips = synth(dir.path(), "commuter", &["--users", "4", "--days", "14"]);
    let out = dir.path().join("sim");
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        format!(
            r#"
input = "{}"
output = "{}"
vehicles = ["Tiny", "Tesla Model 3"]
scenarios = [2]
bins = 5
observation_days = 30.44

[[vehicle]]
name = "Tiny"
usable_capacity_kwh = 12.0
rate_urban_wh_per_km = 95
rate_highway_wh_per_km = 160
rate_combined_wh_per_km = 125

[[policy]]
name = "weekend"
power_kw = 11
soc_trigger = 0.5
min_duration_minutes = 120
window = {{ days = ["Sat", "Sun"], start = "09:00", end = "18:00" }}
"#,
            trips.display(),
            out.display()
        ),
    )
    .unwrap();
    let run = evreplay(&["simulate", "--config", p(&config)]);
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    let matrix = fs::read_to_string(out.join("matrix.csv")).unwrap();
    let cells: Vec<(String, String)> = matrix
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].to_string())
        })
        .collect();
    let expect = [("scenario-2", "Tiny"), ("scenario-2", "Tesla Model 3"), ("weekend", "Tiny"), ("weekend", "Tesla Model 3")];
    assert_eq!(cells, expect.map(|(a, b)| (a.to_string(), b.to_string())));
    let hist = fs::read_to_string(out.join("distributions/monthly_charges__weekend__Tiny.csv")).unwrap();
    assert_eq!(hist.lines().count(), 6);
    assert_eq!(manifest(&out)["config"]["effective_observation_days"], 30.44);

    // Flags override the file.
    let run = evreplay(&["simulate", "--config", p(&config), "--scenarios", "9"]);
    assert_eq!(code(&run), 2);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("env-out");
    let run = Command::new(env!("CARGO_BIN_EXE_evreplay"))
        .args(["synth", "--profile", "commuter", "--users", "2", "--days", "3"])
        .env("EVREPLAY_OUTPUT", &out)
        .output()
        .unwrap();
    assert_eq!(code(&run), 0, "{}", stderr(&run));
    assert!(out.join("trips.csv").is_file());

    let flag_out = dir.path().join("flag-out");
    let run = Command::new(env!("CARGO_BIN_EXE_evreplay"))
        .args(["synth", "--profile", "commuter", "--users", "2", "--days", "3", "--output", p(&flag_out)])
        .env("EVREPLAY_OUTPUT", &out)
        .output()
        .unwrap();
    assert_eq!(code(&run), 0);
    assert!(flag_out.join("trips.csv").is_file());
}
