//! Uniform grids on periodic boxes and truncated half-spaces.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    PeriodicBox,
    HalfSpace,
}

/// A tensor-product grid with row-major point ordering (last axis fastest).
///
/// For [`GridKind::HalfSpace`] the last axis is the normal direction with
/// nodes `x_N = j·X_max/n`, `j = 0..n`; the remaining axes are periodic.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    kind: GridKind,
    lengths: Vec<f64>,
    points: Vec<usize>,
    origins: Vec<f64>,
}

pub const MIN_POINTS: usize = 8;

impl SpectralGrid {
    pub fn periodic(lengths: &[f64], points: &[usize]) -> Result<Self> {
        let origins = vec![0.0; lengths.len()];
        Self::build(GridKind::PeriodicBox, lengths, points, origins)
    }

    /// A periodic box whose axes start at the given coordinates.
    pub fn periodic_with_origin(lengths: &[f64], points: &[usize], origins: &[f64]) -> Result<Self> {
        Self::build(GridKind::PeriodicBox, lengths, points, origins.to_vec())
    }

    pub fn half_space(
        tangential_lengths: &[f64],
        tangential_points: &[usize],
        x_max: f64,
        normal_points: usize,
    ) -> Result<Self> {
        let mut lengths = tangential_lengths.to_vec();
        lengths.push(x_max);
        let mut points = tangential_points.to_vec();
        points.push(normal_points);
        let origins = vec![0.0; lengths.len()];
        Self::build(GridKind::HalfSpace, &lengths, &points, origins)
    }

    fn build(kind: GridKind, lengths: &[f64], points: &[usize], origins: Vec<f64>) -> Result<Self> {
        let dim = lengths.len();
        if !(1..=3).contains(&dim) {
            return Err(invalid("dim", format!("{dim} not in 1..=3")));
        }
        if points.len() != dim || origins.len() != dim {
            return Err(invalid("points", "one entry per axis required"));
        }
        for (&l, &n) in lengths.iter().zip(points) {
            if !(l > 0.0 && l.is_finite()) {
                return Err(invalid("length", format!("{l} must be positive")));
            }
            if n < MIN_POINTS || !n.is_power_of_two() {
                return Err(invalid(
                    "points",
                    format!("{n} must be a power of two and at least {MIN_POINTS}"),
                ));
            }
        }
        Ok(Self {
            kind,
            lengths: lengths.to_vec(),
            points: points.to_vec(),
            origins,
        })
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn total_points(&self) -> usize {
        self.points.iter().product()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.points[axis] as f64
    }

    /// Truncation of the normal axis (half-space grids only).
    pub fn x_max(&self) -> Option<f64> {
        match self.kind {
            GridKind::HalfSpace => self.lengths.last().copied(),
            GridKind::PeriodicBox => None,
        }
    }

    /// Number of periodic (Fourier) axes.
    pub fn periodic_axes(&self) -> usize {
        match self.kind {
            GridKind::PeriodicBox => self.dim(),
            GridKind::HalfSpace => self.dim() - 1,
        }
    }

    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        self.origins[axis] + i as f64 * self.spacing(axis)
    }

    pub fn coords(&self, axis: usize) -> Vec<f64> {
        (0..self.points[axis]).map(|i| self.coordinate(axis, i)).collect()
    }

    /// Angular wavenumber of FFT bin `i` on a periodic axis (numpy `fftfreq` ordering).
    pub fn wavenumber(&self, axis: usize, i: usize) -> f64 {
        let n = self.points[axis] as isize;
        let i = i as isize;
        let k = if i < n / 2 { i } else { i - n };
        2.0 * PI * k as f64 / self.lengths[axis]
    }

    pub fn wavenumbers(&self, axis: usize) -> Vec<f64> {
        (0..self.points[axis]).map(|i| self.wavenumber(axis, i)).collect()
    }

    /// Largest `|ξ|` over the periodic axes.
    pub fn max_frequency(&self) -> f64 {
        (0..self.periodic_axes())
            .map(|a| (PI * self.points[a] as f64 / self.lengths[a]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dim()];
        for a in (0..self.dim().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * self.points[a + 1];
        }
        strides
    }

    /// Multi-index of a flat point index.
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.dim()).rev() {
            out[a] = flat % self.points[a];
            flat /= self.points[a];
        }
    }

    /// Cell volume `∏ h_a`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Periodic box of twice the normal length onto which half-space fields
    /// are extended; its normal nodes run over `[-X_max, X_max)`.
    pub fn extended_box(&self) -> Result<SpectralGrid> {
        if self.kind != GridKind::HalfSpace {
            return Err(LabError::WrongGridKind("extended_box needs a half-space grid".into()));
        }
        let d = self.dim();
        let mut lengths = self.lengths.clone();
        let mut points = self.points.clone();
        let mut origins = vec![0.0; d];
        lengths[d - 1] *= 2.0;
        points[d - 1] *= 2;
        origins[d - 1] = -self.lengths[d - 1];
        Self::build(GridKind::PeriodicBox, &lengths, &points, origins)
    }

    /// The grid with the normal axis coarsened or refined to `normal_points`.
    pub fn with_normal_points(&self, normal_points: usize) -> Result<SpectralGrid> {
        let mut points = self.points.clone();
        *points.last_mut().expect("non-empty") = normal_points;
        Self::build(self.kind, &self.lengths, &points, self.origins.clone())
    }

    pub fn require_kind(&self, kind: GridKind, what: &str) -> Result<()> {
        if self.kind != kind {
            return Err(LabError::WrongGridKind(format!(
                "{what} requires a {kind:?} grid, got {:?}",
                self.kind
            )));
        }
        Ok(())
    }

    /// Trapezoid weight of normal node `j` (half weight at `x_N = 0`).
    pub fn normal_weight(&self, j: usize) -> f64 {
        let h = self.spacing(self.dim() - 1);
        if self.kind == GridKind::HalfSpace && j == 0 {
            0.5 * h
        } else {
            h
        }
    }

    /// Trapezoid quadrature weight of a flat point.
    pub fn point_weight(&self, flat: usize) -> f64 {
        let d = self.dim();
        let tangential: f64 = (0..d - 1).map(|a| self.spacing(a)).product();
        let j = flat % self.points[d - 1];
        tangential * self.normal_weight(j)
    }
}
