//! Binary grid snapshots and trajectory tables.
//!
//! Snapshot layout, all little-endian:
//! `b"RGRD"`, `u32` version, `u32` dims, `u32` components, `u8` dtype tag,
//! `u8` grid kind (0 periodic, 1 half-space), then per axis a `u64` point
//! count and an `f64` length, then the values component-major and row-major
//! within a component as `(re, im)` `f64` pairs.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::semigroup::Snapshot;
use crate::spectral::norms::l2_norm;
use crate::spectral::{Field, GridKind, SpectralGrid};

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"RGRD";
pub const SNAPSHOT_VERSION: u32 = 1;
/// Complex values stored as two `f64`.
pub const DTYPE_COMPLEX128: u8 = 1;

fn format_error(reason: impl Into<String>) -> LabError {
    LabError::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, reason.into()))
}

pub fn write_snapshot(w: &mut impl Write, f: &Field) -> Result<()> {
    let grid = f.grid();
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(f.components() as u32).to_le_bytes())?;
    w.write_all(&[DTYPE_COMPLEX128])?;
    w.write_all(&[match grid.kind() {
        GridKind::PeriodicBox => 0,
        GridKind::HalfSpace => 1,
    }])?;
    for (&n, &l) in grid.points().iter().zip(grid.lengths()) {
        w.write_all(&(n as u64).to_le_bytes())?;
        w.write_all(&l.to_le_bytes())?;
    }
    for v in f.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

fn take<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

/// Reads a snapshot back; periodic boxes are rebuilt with origin zero.
pub fn read_snapshot(r: &mut impl Read) -> Result<Field> {
    if &take::<4>(r)? != SNAPSHOT_MAGIC {
        return Err(format_error("bad snapshot magic"));
    }
    let version = u32::from_le_bytes(take(r)?);
    if version != SNAPSHOT_VERSION {
        return Err(format_error(format!("unsupported snapshot version {version}")));
    }
    let dims = u32::from_le_bytes(take(r)?) as usize;
    let comps = u32::from_le_bytes(take(r)?) as usize;
    let [dtype] = take::<1>(r)?;
    if dtype != DTYPE_COMPLEX128 {
        return Err(format_error(format!("unsupported dtype tag {dtype}")));
    }
    let [kind] = take::<1>(r)?;
    let mut points = Vec::with_capacity(dims);
    let mut lengths = Vec::with_capacity(dims);
    for _ in 0..dims {
        points.push(u64::from_le_bytes(take(r)?) as usize);
        lengths.push(f64::from_le_bytes(take(r)?));
    }
    let grid = match kind {
        0 => SpectralGrid::periodic(&lengths, &points)?,
        1 => SpectralGrid::half_space(&lengths[..dims - 1], &points[..dims - 1], lengths[dims - 1], points[dims - 1])?,
        k => return Err(format_error(format!("unknown grid kind {k}"))),
    };
    let n = comps * grid.total_points();
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let re = f64::from_le_bytes(take(r)?);
        let im = f64::from_le_bytes(take(r)?);
        values.push(Complex64::new(re, im));
    }
    Field::from_values(&grid, comps, values)
}

/// One row of the trajectory table: discrete `L2` norms of each state block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub rho_l2: f64,
    pub grad_rho_l2: f64,
    pub u_l2: f64,
    pub jacobian_l2: f64,
    pub hessian_l2: f64,
}

impl TrajectoryRow {
    pub fn of(s: &Snapshot) -> Self {
        Self {
            t: s.t,
            rho_l2: l2_norm(&s.rho()),
            grad_rho_l2: l2_norm(&s.grad_rho()),
            u_l2: l2_norm(&s.u()),
            jacobian_l2: l2_norm(&s.jacobian()),
            hessian_l2: l2_norm(&s.hessian()),
        }
    }
}

pub fn write_trajectory_csv(w: impl Write, rows: &[TrajectoryRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(csv_error)?;
    }
    out.flush()?;
    Ok(())
}

pub(crate) fn csv_error(e: csv::Error) -> LabError {
    LabError::Io(std::io::Error::other(e.to_string()))
}
