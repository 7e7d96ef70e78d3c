//! Trip-log parsing and the CSV data products.

use std::collections::HashMap;
use std::io::{Read, Write};

use evreplay_core::ingest::{Trip, TripRecord, HEADER};
use evreplay_core::metrics::{DistributionSummary, MatrixCell, UserCharacterization, UserMetricsRow};
use evreplay_core::sim::SimulationResult;

/// A row of a trip log that could not be turned into a trip.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RowDiagnostic {
    /// 1-based line number; the header is line 1.
    pub line: u64,
    pub message: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("unexpected header {found:?}; expected {expected}")]
    Header { found: Vec<String>, expected: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Default)]
pub struct ParsedLog {
    pub records: Vec<TripRecord>,
    pub diagnostics: Vec<RowDiagnostic>,
}

/// Parses a trip log. Malformed rows are reported with their line number
/// and skipped; an unreadable stream or a wrong header is fatal.
pub fn parse_trip_log<R: Read>(reader: R) -> Result<ParsedLog, ParseError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::None)
        .from_reader(reader);
    let header = rdr.headers()?;
    if header.iter().map(str::trim).ne(HEADER) {
        return Err(ParseError::Header {
            found: header.iter().map(String::from).collect(),
            expected: HEADER.join(","),
        });
    }
    let mut log = ParsedLog::default();
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {
                let line = record.position().map_or(0, |p| p.line());
                let fields: Vec<&str> = record.iter().collect();
                match TripRecord::from_fields(&fields) {
                    Ok(rec) => log.records.push(rec),
                    Err(err) => log.diagnostics.push(RowDiagnostic {
                        line,
                        message: err.to_string(),
                    }),
                }
            }
            Err(err) if err.is_io_error() => return Err(err.into()),
            Err(err) => log.diagnostics.push(RowDiagnostic {
                line: err.position().map_or(0, |p| p.line()),
                message: err.to_string(),
            }),
        }
    }
    Ok(log)
}

/// Groups records per user, users in order of first appearance and trips
/// in file order.
pub fn group_by_user(records: Vec<TripRecord>) -> Vec<(String, Vec<Trip>)> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut users: Vec<(String, Vec<Trip>)> = Vec::new();
    for rec in records {
        let slot = *index.entry(rec.user_id.clone()).or_insert_with(|| {
            users.push((rec.user_id, Vec::new()));
            users.len() - 1
        });
        users[slot].1.push(rec.trip);
    }
    users
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(out)
}

pub fn write_trips<'a, W, I>(out: W, users: I) -> csv::Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a str, &'a [Trip])>,
{
    let mut w = writer(out);
    w.write_record(HEADER)?;
    for (user, trips) in users {
        for t in trips {
            w.write_record([
                user,
                &t.start.to_string(),
                &t.end.to_string(),
                &t.km_urban.to_string(),
                &t.km_extraurban.to_string(),
                &t.km_highway.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_user_metrics<W: Write>(out: W, rows: &[UserMetricsRow]) -> csv::Result<()> {
    let mut w = writer(out);
    w.write_record([
        "user_id",
        "vehicle",
        "policy",
        "feasible_trip_pct",
        "monthly_charges",
        "avg_soc_after_trip_pct",
        "suitable",
    ])?;
    for r in rows {
        let m = &r.metrics;
        w.write_record([
            r.user_id.as_str(),
            &r.vehicle,
            &r.policy,
            &m.feasible_trip_pct.to_string(),
            &m.monthly_charges.to_string(),
            &m.avg_soc_after_trip_pct.to_string(),
            if m.suitable { "true" } else { "false" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_matrix<W: Write>(out: W, cells: &[MatrixCell]) -> csv::Result<()> {
    let mut w = writer(out);
    w.write_record([
        "policy",
        "vehicle",
        "users",
        "mean_feasible_trip_pct",
        "mean_avg_soc_after_trip_pct",
        "mean_monthly_charges",
        "suitable_user_pct",
    ])?;
    for c in cells {
        w.write_record([
            c.policy.as_str(),
            &c.vehicle,
            &c.users.to_string(),
            &c.mean_feasible_trip_pct.to_string(),
            &c.mean_avg_soc_after_trip_pct.to_string(),
            &c.mean_monthly_charges.to_string(),
            &c.suitable_user_pct.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One summary row per labelled distribution.
pub fn write_summaries<W: Write>(out: W, label_columns: &[&str], rows: &[(Vec<String>, DistributionSummary)]) -> csv::Result<()> {
    let mut w = writer(out);
    let mut header: Vec<&str> = label_columns.to_vec();
    header.extend(["count", "mean", "std", "min", "q1", "median", "q3", "max"]);
    w.write_record(&header)?;
    for (labels, s) in rows {
        let mut rec = labels.clone();
        rec.extend(
            [s.count as f64, s.mean, s.std, s.min, s.q1, s.median, s.q3, s.max]
                .iter()
                .enumerate()
                .map(|(i, v)| if i == 0 { s.count.to_string() } else { v.to_string() }),
        );
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Histogram of one distribution as PDF (bin mass) and CDF columns.
pub fn write_histogram<W: Write>(out: W, summary: &DistributionSummary) -> csv::Result<()> {
    let mut w = writer(out);
    w.write_record(["bin_lo", "bin_hi", "pdf", "cdf"])?;
    for (bin, cdf) in summary.histogram.iter().zip(summary.cdf()) {
        w.write_record([bin.lo.to_string(), bin.hi.to_string(), bin.mass.to_string(), cdf.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_characterization<W: Write>(out: W, rows: &[(String, UserCharacterization)]) -> csv::Result<()> {
    let mut w = writer(out);
    w.write_record([
        "user_id",
        "active_days",
        "avg_daily_trips",
        "avg_daily_distance_km",
        "utilization_pct",
    ])?;
    for (user, c) in rows {
        w.write_record([
            user.as_str(),
            &c.active_days.to_string(),
            &c.avg_daily_trips.to_string(),
            &c.avg_daily_distance_km.to_string(),
            &c.utilization_pct.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub const TRACE_HEADER: [&str; 7] = [
    "user_id",
    "trip_index",
    "start_ts",
    "energy_kwh",
    "soc_before_kwh",
    "soc_after_kwh",
    "feasible",
];

/// Per-trip SoC trace rows of several simulations, in the given order.
pub fn write_trace<'a, W, I>(out: W, results: I) -> csv::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a SimulationResult>,
{
    let mut w = writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in results {
        for t in &r.trips {
            w.write_record([
                r.user_id.as_str(),
                &t.index.to_string(),
                &t.start.to_string(),
                &t.energy_required_kwh.to_string(),
                &t.soc_before_kwh.to_string(),
                &t.soc_after_kwh.to_string(),
                if t.feasible { "true" } else { "false" },
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = "user_id,start_ts,end_ts,km_urban,km_extraurban,km_highway\n";

    #[test]
    fn parses_rows() {
        let input = format!("{HEAD}u1,2024-03-01T08:00:00,2024-03-01T08:30:00,5.0,2.0,0.0\n");
        let log = parse_trip_log(input.as_bytes()).unwrap();
        assert!(log.diagnostics.is_empty());
        assert_eq!(log.records.len(), 1);
        assert_eq!(log.records[0].trip.total_km(), 7.0);
        assert_eq!(log.records[0].trip.duration_secs(), 1800);
    }

    #[test]
    fn header_only_is_empty() {
        let log = parse_trip_log(HEAD.as_bytes()).unwrap();
        assert!(log.records.is_empty() && log.diagnostics.is_empty());
    }

    #[test]
    fn malformed_rows_reported_with_lines() {
        let input = format!(
            "{HEAD}u1,2024-03-01T08:00:00,2024-03-01T08:30:00,-1,0,0\n\
             u1,2024-03-01T09:00:00,2024-03-01T09:30:00,1,0,0\n\
             u1,2024-03-01T10:00:00,2024-03-01T10:30:00,1,0\n\
             u1,not-a-time,2024-03-01T11:30:00,1,0,0\n"
        );
        let log = parse_trip_log(input.as_bytes()).unwrap();
        assert_eq!(log.records.len(), 1);
        let lines: Vec<u64> = log.diagnostics.iter().map(|d| d.line).collect();
        assert_eq!(lines, [2, 4, 5]);
        assert!(log.diagnostics[0].message.contains("negative distance"));
        assert!(log.diagnostics[1].message.contains("expected 6 fields"));
        assert!(log.diagnostics[2].message.contains("bad timestamp"));
    }

    #[test]
    fn wrong_header_is_fatal() {
        let err = parse_trip_log("a,b,c\n1,2,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, ParseError::Header { .. }));
    }

    #[test]
    fn grouping_keeps_first_appearance_order() {
        let input = format!(
            "{HEAD}b,2024-03-01T08:00:00,2024-03-01T08:30:00,1,0,0\n\
             a,2024-03-01T08:00:00,2024-03-01T08:30:00,1,0,0\n\
             b,2024-03-01T09:00:00,2024-03-01T09:30:00,1,0,0\n"
        );
        let users = group_by_user(parse_trip_log(input.as_bytes()).unwrap().records);
        assert_eq!(users.iter().map(|(u, t)| (u.as_str(), t.len())).collect::<Vec<_>>(), [("b", 2), ("a", 1)]);
    }

    #[test]
    fn trips_round_trip_through_csv() {
        let input = format!("{HEAD}u1,2024-03-01T08:00:00,2024-03-01T08:30:00,5.123,0.30000000000000004,0\n");
        let users = group_by_user(parse_trip_log(input.as_bytes()).unwrap().records);
        let mut out = Vec::new();
        write_trips(&mut out, users.iter().map(|(u, t)| (u.as_str(), t.as_slice()))).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), input);
    }
}
