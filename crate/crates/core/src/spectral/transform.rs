//! Discrete Fourier transforms along selected axes.
//!
//! Forward transforms carry no scale factor; inverse transforms divide by the
//! number of points along the transformed axes, so `inverse(forward(f)) = f`.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::cell::RefCell;
use std::sync::Arc;

use super::field::Field;
use super::grid::GridKind;
use crate::error::Result;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, dir: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(n, dir))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Transforms one component laid out row-major with shape `points` along `axes`.
pub fn fft_axes(data: &mut [Complex64], points: &[usize], axes: &[usize], dir: Direction) {
    let total: usize = points.iter().product();
    debug_assert_eq!(data.len(), total);
    let d = points.len();
    let fdir = match dir {
        Direction::Forward => FftDirection::Forward,
        Direction::Inverse => FftDirection::Inverse,
    };
    let mut norm = 1.0;
    for &axis in axes {
        let n = points[axis];
        norm *= n as f64;
        let fft = plan(n, fdir);
        let stride: usize = points[axis + 1..d].iter().product();
        if stride == 1 {
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            for line in data.chunks_exact_mut(n) {
                fft.process_with_scratch(line, &mut scratch);
            }
            continue;
        }
        let outer = total / (n * stride);
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for o in 0..outer {
            let base = o * n * stride;
            for s in 0..stride {
                for (k, b) in buf.iter_mut().enumerate() {
                    *b = data[base + k * stride + s];
                }
                fft.process_with_scratch(&mut buf, &mut scratch);
                for (k, b) in buf.iter().enumerate() {
                    data[base + k * stride + s] = *b;
                }
            }
        }
    }
    if dir == Direction::Inverse {
        let inv = 1.0 / norm;
        data.iter_mut().for_each(|v| *v *= inv);
    }
}

fn transform_all(f: &Field, axes: &[usize], dir: Direction) -> Field {
    let mut out = f.clone();
    let points = f.grid().points().to_vec();
    for c in 0..f.components() {
        fft_axes(out.component_mut(c), &points, axes, dir);
    }
    out
}

/// Full transform of a periodic-box field. The result holds Fourier
/// coefficients indexed like the grid (FFT ordering per axis).
pub fn forward(f: &Field) -> Result<Field> {
    f.grid().require_kind(GridKind::PeriodicBox, "forward transform")?;
    let axes: Vec<usize> = (0..f.grid().dim()).collect();
    Ok(transform_all(f, &axes, Direction::Forward))
}

pub fn inverse(f: &Field) -> Result<Field> {
    f.grid().require_kind(GridKind::PeriodicBox, "inverse transform")?;
    let axes: Vec<usize> = (0..f.grid().dim()).collect();
    Ok(transform_all(f, &axes, Direction::Inverse))
}

/// Transform along the tangential axes of a half-space field; the normal axis
/// is left untouched.
pub fn tangential_transform(f: &Field) -> Result<Field> {
    f.grid().require_kind(GridKind::HalfSpace, "tangential transform")?;
    let axes: Vec<usize> = (0..f.grid().dim() - 1).collect();
    Ok(transform_all(f, &axes, Direction::Forward))
}

pub fn tangential_inverse(f: &Field) -> Result<Field> {
    f.grid().require_kind(GridKind::HalfSpace, "tangential inverse")?;
    let axes: Vec<usize> = (0..f.grid().dim() - 1).collect();
    Ok(transform_all(f, &axes, Direction::Inverse))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::SpectralGrid;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn round_trip_2d() {
        let g = SpectralGrid::periodic(&[2.0 * PI, 3.0], &[16, 8]).unwrap();
        let f = Field::from_fn(&g, 2, |x, out| {
            out[0] = c((x[0] * 2.0).sin() + x[1]);
            out[1] = Complex64::new(x[0].cos(), x[1] * x[1]);
        });
        let back = inverse(&forward(&f).unwrap()).unwrap();
        let err = back.sub(&f).unwrap().max_abs();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn single_mode_lands_in_one_bin() {
        let g = SpectralGrid::periodic(&[2.0 * PI], &[16]).unwrap();
        let f = Field::scalar_fn(&g, |x| Complex64::new(0.0, 3.0 * x[0]).exp());
        let s = forward(&f).unwrap();
        for (k, v) in s.values().iter().enumerate() {
            let expect = if k == 3 { 16.0 } else { 0.0 };
            assert!((v.norm() - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn tangential_leaves_normal_axis() {
        let g = SpectralGrid::half_space(&[2.0 * PI], &[8], 5.0, 16).unwrap();
        let f = Field::scalar_fn(&g, |x| Complex64::new(0.0, x[0]).exp() * (-x[1]).exp());
        let s = tangential_transform(&f).unwrap();
        let n = 16;
        for j in 0..n {
            let xn = g.coordinate(1, j);
            assert!((s.values()[n + j] - c(8.0 * (-xn).exp())).norm() < 1e-12);
            assert!(s.values()[2 * n + j].norm() < 1e-12);
        }
        let back = tangential_inverse(&s).unwrap();
        assert!(back.sub(&f).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn wrong_kind_rejected() {
        let g = SpectralGrid::periodic(&[1.0], &[8]).unwrap();
        assert!(tangential_transform(&Field::zeros(&g, 1)).is_err());
    }
}
