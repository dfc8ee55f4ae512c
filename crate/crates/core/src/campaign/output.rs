//! Artifact layout of a campaign output directory.
//!
//! ```text
//! manifest.json          config echo, versions, schema, wall time, file list
//! records/NNNN-<id>.json one JSON record per result
//! sweep.csv              fixed-schema sweep table (sweep campaigns)
//! plots/<name>.dat       two-column gnuplot data, `#` header lines
//! trajectory.csv         per-time state norms (Duhamel campaigns)
//! snapshots/<name>.bin   binary grid snapshots
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::CampaignConfig;
use super::Outcome;
use crate::error::Result;
use crate::io::{csv_error, write_snapshot, write_trajectory_csv, SNAPSHOT_VERSION};

pub const CSV_SCHEMA_VERSION: u32 = 1;
pub const CSV_COLUMNS: [&str; 8] = [
    "campaign",
    "lambda_abs",
    "lambda_arg",
    "norm_kind",
    "value",
    "theoretical_slope",
    "fitted_slope",
    "verdict",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub csv_schema_version: u32,
    pub csv_columns: Vec<String>,
    pub snapshot_version: u32,
    pub config: CampaignConfig,
    pub workers: usize,
    pub wall_time_seconds: f64,
    pub pass: bool,
    pub failures: Vec<String>,
    pub files: Vec<String>,
}

const SUBDIRS: [&str; 3] = ["records", "plots", "snapshots"];

fn write_text(dir: &Path, rel: &str, text: &str, files: &mut Vec<String>) -> Result<()> {
    fs::write(dir.join(rel), text)?;
    files.push(rel.to_string());
    Ok(())
}

fn json_text<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| std::io::Error::other(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes all artifacts and then the manifest. Output of a previous run in
/// the same directory (recognized by its manifest) is replaced.
pub fn write_artifacts(
    dir: &Path,
    config: &CampaignConfig,
    outcome: &Outcome,
    workers: usize,
    wall_time_seconds: f64,
) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    if dir.join("manifest.json").exists() {
        for sub in SUBDIRS {
            let p = dir.join(sub);
            if p.is_dir() {
                fs::remove_dir_all(p)?;
            }
        }
        for f in ["sweep.csv", "trajectory.csv"] {
            let p = dir.join(f);
            if p.exists() {
                fs::remove_file(p)?;
            }
        }
    }
    let mut files = Vec::new();

    fs::create_dir_all(dir.join("records"))?;
    for (i, r) in outcome.records.iter().enumerate() {
        write_text(dir, &format!("records/{i:04}-{}.json", r.id), &json_text(r)?, &mut files)?;
    }

    if !outcome.sweep_rows.is_empty() {
        let mut w = csv::Writer::from_path(dir.join("sweep.csv")).map_err(csv_error)?;
        for row in &outcome.sweep_rows {
            w.serialize(row).map_err(csv_error)?;
        }
        w.flush()?;
        files.push("sweep.csv".into());
    }

    if !outcome.plots.is_empty() {
        fs::create_dir_all(dir.join("plots"))?;
    }
    for p in &outcome.plots {
        let mut text = String::new();
        for h in &p.header {
            text.push_str(&format!("# {h}\n"));
        }
        for (x, y) in &p.points {
            text.push_str(&format!("{x} {y}\n"));
        }
        write_text(dir, &format!("plots/{}.dat", p.name), &text, &mut files)?;
    }

    if !outcome.trajectory.is_empty() {
        write_trajectory_csv(fs::File::create(dir.join("trajectory.csv"))?, &outcome.trajectory)?;
        files.push("trajectory.csv".into());
    }

    if !outcome.snapshots.is_empty() {
        fs::create_dir_all(dir.join("snapshots"))?;
    }
    for (name, field) in &outcome.snapshots {
        let rel = format!("snapshots/{name}.bin");
        let mut w = std::io::BufWriter::new(fs::File::create(dir.join(&rel))?);
        write_snapshot(&mut w, field)?;
        w.flush()?;
        files.push(rel);
    }

    let manifest = Manifest {
        tool: "resolvent-lab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        csv_schema_version: CSV_SCHEMA_VERSION,
        csv_columns: CSV_COLUMNS.iter().map(|c| c.to_string()).collect(),
        snapshot_version: SNAPSHOT_VERSION,
        config: config.clone(),
        workers,
        wall_time_seconds,
        pass: outcome.pass(),
        failures: outcome.failures(),
        files,
    };
    fs::write(dir.join("manifest.json"), json_text(&manifest)?)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::super::{Check, PlotData, Record, SweepRow};
    use super::*;

    #[test]
    fn layout_and_header() {
        let config = CampaignConfig::from_toml(
            "name = \"t\"\nkind = \"sqr-verify\"\n[model]\nalpha = 1.0\nbeta = 1.0\n",
        )
        .unwrap();
        let outcome = Outcome {
            records: vec![Record { id: "a".into(), data: serde_json::json!({"x": 1.5}), checks: vec![Check::at_most("x", 1.5, 2.0)] }],
            sweep_rows: vec![SweepRow {
                campaign: "t".into(),
                lambda_abs: 4.0,
                lambda_arg: 0.0,
                norm_kind: "resolvent".into(),
                value: 0.5,
                theoretical_slope: 0.0,
                fitted_slope: 0.01,
                verdict: "pass".into(),
            }],
            plots: vec![PlotData { name: "p".into(), header: vec!["h".into()], points: vec![(1.0, 2.0)] }],
            ..Outcome::default()
        };
        let dir = tempfile::tempdir().unwrap();
        let m = write_artifacts(dir.path(), &config, &outcome, 1, 0.0).unwrap();
        assert!(m.pass);
        assert_eq!(m.files, vec!["records/0000-a.json", "sweep.csv", "plots/p.dat"]);
        let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert_eq!(csv.lines().next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(fs::read_to_string(dir.path().join("plots/p.dat")).unwrap(), "# h\n1 2\n");
        let back: Manifest = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(back.config, config);
    }
}
