//! Result documents persisted by the CLI: one JSON document per run plus
//! flat CSV tables for plotting.

use std::io::Write;

use serde::Serialize;

use crate::experiments::fit::FitReport;
use crate::experiments::{ScalingPoint, ScalingRunConfig, TransitionConfig, TransitionEstimate};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct EnvironmentMetadata {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub os: &'static str,
    pub workers: usize,
}

impl EnvironmentMetadata {
    pub fn current(workers: usize) -> EnvironmentMetadata {
        EnvironmentMetadata {
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            os: std::env::consts::OS,
            workers,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ScalingRunDocument {
    pub format_version: u32,
    pub config: ScalingRunConfig,
    pub points: Vec<ScalingPoint>,
    pub fit: Option<FitReport>,
    pub environment: EnvironmentMetadata,
}

impl ScalingRunDocument {
    pub fn new(
        config: ScalingRunConfig,
        points: Vec<ScalingPoint>,
        fit: Option<FitReport>,
    ) -> ScalingRunDocument {
        let workers = config.workers;
        ScalingRunDocument {
            format_version: FORMAT_VERSION,
            config,
            points,
            fit,
            environment: EnvironmentMetadata::current(workers),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TransitionDocument {
    pub format_version: u32,
    pub config: TransitionConfig,
    pub estimate: TransitionEstimate,
    pub environment: EnvironmentMetadata,
}

impl TransitionDocument {
    pub fn new(config: TransitionConfig, estimate: TransitionEstimate) -> TransitionDocument {
        let workers = config.workers;
        TransitionDocument {
            format_version: FORMAT_VERSION,
            config,
            estimate,
            environment: EnvironmentMetadata::current(workers),
        }
    }
}

/// One CSV row per scaling point.
pub fn scaling_points_csv(points: &[ScalingPoint], out: impl Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "trials",
        "sat",
        "unsat",
        "timeouts",
        "sat_fraction",
        "timeout_fraction",
        "censored",
        "median_runtime_s",
        "total_decisions",
        "total_propagations",
    ])?;
    for p in points {
        w.write_record([
            p.n.to_string(),
            p.trials.to_string(),
            p.sat.to_string(),
            p.unsat.to_string(),
            p.timeouts.to_string(),
            p.sat_fraction.map_or_else(String::new, |f| f.to_string()),
            p.timeout_fraction.to_string(),
            p.censored.to_string(),
            p.median_runtime_s.map_or_else(String::new, |m| m.to_string()),
            p.total_decisions.to_string(),
            p.total_propagations.to_string(),
        ])?;
    }
    w.flush()
}

/// One CSV row per sweep grid point.
pub fn transition_csv(estimate: &TransitionEstimate, out: impl Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        estimate.parameter.to_string().as_str(),
        "sat_probability",
        "timeout_fraction",
        "trials",
    ])?;
    for (i, value) in estimate.grid.iter().enumerate() {
        w.write_record([
            value.to_string(),
            estimate.sat_probability[i].map_or_else(String::new, |p| p.to_string()),
            estimate.timeout_fraction[i].to_string(),
            estimate.trials.to_string(),
        ])?;
    }
    w.flush()
}

/// Read `(n, median)` pairs from CSV with a header line, as produced by
/// [`scaling_points_csv`] or any two-column `n,median` table.
pub fn read_fit_csv(data: &str) -> Result<Vec<(f64, f64)>, csv::Error> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(data.as_bytes());
    let headers = reader.headers()?.clone();
    let median_col = headers
        .iter()
        .position(|h| h == "median_runtime_s" || h == "median")
        .unwrap_or(1);
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record?;
        let n: f64 = match record.get(0).map(str::parse) {
            Some(Ok(v)) => v,
            _ => continue,
        };
        let median: f64 = match record.get(median_col).map(str::parse) {
            Some(Ok(v)) => v,
            _ => continue, // censored rows have an empty median field
        };
        points.push((n, median));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::run_scaling;

    fn small_run() -> (ScalingRunConfig, Vec<ScalingPoint>) {
        let config = ScalingRunConfig {
            r: 0.5,
            s: 0.2,
            n_grid: vec![8, 10],
            trials_per_n: 4,
            label: "report-test".to_string(),
            ..Default::default()
        };
        let points = run_scaling(&config).unwrap();
        (config, points)
    }

    #[test]
    fn scaling_document_serializes_with_version() {
        let (config, points) = small_run();
        let doc = ScalingRunDocument::new(config, points, None);
        let json = serde_json::to_string_pretty(&doc).unwrap();
        assert!(json.contains("\"format_version\": 1"));
        assert!(json.contains("\"median_runtime_s\""));
    }

    #[test]
    fn csv_round_trips_into_fit_input() {
        let (_, points) = small_run();
        let mut buf = Vec::new();
        scaling_points_csv(&points, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let parsed = read_fit_csv(&text).unwrap();
        assert_eq!(parsed.len(), points.len());
        assert_eq!(parsed[0].0, f64::from(points[0].n));
    }

    #[test]
    fn plain_two_column_fit_csv() {
        let parsed = read_fit_csv("n,median\n10,0.5\n20,1.5\n").unwrap();
        assert_eq!(parsed, vec![(10.0, 0.5), (20.0, 1.5)]);
    }
}
