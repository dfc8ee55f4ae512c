//! Configuration-driven campaigns: one entry point per study kind, results
//! gathered in order by a single collector and written as JSON records, CSV
//! tables, plot data and binary snapshots.

mod config;
mod output;
mod studies;

use serde::Serialize;

pub use config::{
    BesovConfig, CampaignConfig, CampaignKind, ContourConfig, DomainChoice, GridConfig, L1Config, ModelConfig,
    OracleConfig, SolveConfig, SweepConfig, SystemChoice, TimeConfig,
};
pub use output::{write_artifacts, Manifest, CSV_COLUMNS, CSV_SCHEMA_VERSION};
pub use studies::band_limited;

use crate::error::{LabError, Result};
use crate::io::TrajectoryRow;
use crate::spectral::Field;

/// One measured number with its tolerance and verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    /// `value ≤ tolerance` unless stated otherwise in `name`.
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value <= tolerance }
    }

    /// Passes when `|value − target| ≤ tolerance`; `value` holds the deviation.
    pub fn near(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self::at_most(name, (value - target).abs(), tolerance)
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        let pass = value >= lo && value <= hi;
        Self { name: format!("{} in [{lo}, {hi}]", name.into()), value, tolerance: hi - lo, pass }
    }

    pub fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: if ok { 1.0 } else { 0.0 }, tolerance: 1.0, pass: ok }
    }
}

/// A per-result JSON record.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub id: String,
    pub data: serde_json::Value,
    pub checks: Vec<Check>,
}

impl Record {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = String> + '_ {
        self.checks.iter().filter(|c| !c.pass).map(move |c| format!("{}: {} ({} vs {})", self.id, c.name, c.value, c.tolerance))
    }
}

/// A row of the fixed-schema sweep table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub campaign: String,
    pub lambda_abs: f64,
    pub lambda_arg: f64,
    pub norm_kind: String,
    pub value: f64,
    pub theoretical_slope: f64,
    pub fitted_slope: f64,
    pub verdict: String,
}

/// Two-column plot data for one slope fit.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub name: String,
    pub header: Vec<String>,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub records: Vec<Record>,
    pub sweep_rows: Vec<SweepRow>,
    pub plots: Vec<PlotData>,
    pub trajectory: Vec<TrajectoryRow>,
    pub snapshots: Vec<(String, Field)>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.records.iter().all(Record::pass)
    }

    pub fn failures(&self) -> Vec<String> {
        self.records.iter().flat_map(Record::failures).collect()
    }

    /// `Err(Acceptance)` naming every failed check.
    pub fn into_verdict(self) -> Result<Self> {
        if self.pass() {
            Ok(self)
        } else {
            Err(LabError::Acceptance(self.failures().join("; ")))
        }
    }
}

/// Validates and runs a campaign on the current rayon pool.
pub fn run(config: &CampaignConfig) -> Result<Outcome> {
    config.validate()?;
    match config.kind {
        CampaignKind::ResolventSolve => studies::resolvent_solve(config),
        CampaignKind::SqrVerify => studies::sqr_verify(config),
        CampaignKind::L1Quadrature => studies::l1_quadrature(config),
        CampaignKind::Duhamel => studies::duhamel(config),
        CampaignKind::OracleCompare => studies::oracle_compare(config),
    }
}

/// Runs on a dedicated pool of `workers` threads.
pub fn run_with_workers(config: &CampaignConfig, workers: usize) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| LabError::Io(std::io::Error::other(e.to_string())))?;
    pool.install(|| run(config))
}

/// True for errors caused by the configuration rather than by the numerics.
pub fn is_validation_error(e: &LabError) -> bool {
    matches!(
        e,
        LabError::Config { .. }
            | LabError::InvalidParameter { .. }
            | LabError::ExponentWindow(_)
            | LabError::OutsideSector { .. }
    )
}
