//! Fourier multipliers `T_m f = F⁻¹[m·F f]` on periodic boxes.

use num_complex::Complex64;

use super::field::Field;
use super::grid::{GridKind, SpectralGrid};
use super::transform::{forward, inverse};
use crate::error::{invalid, LabError, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Calls `visit(flat, ξ)` for every frequency of a periodic grid.
pub fn for_each_frequency(grid: &SpectralGrid, mut visit: impl FnMut(usize, &[f64])) {
    let d = grid.dim();
    let ks: Vec<Vec<f64>> = (0..d).map(|a| grid.wavenumbers(a)).collect();
    let mut idx = vec![0usize; d];
    let mut xi = vec![0.0; d];
    for p in 0..grid.total_points() {
        grid.unravel(p, &mut idx);
        for a in 0..d {
            xi[a] = ks[a][idx[a]];
        }
        visit(p, &xi);
    }
}

fn non_finite(xi: &[f64], v: Complex64) -> LabError {
    LabError::NonFiniteSymbol {
        frequency: xi.to_vec(),
        value: v,
    }
}

/// Applies a scalar symbol to every component of `f`.
pub fn apply_multiplier(m: impl Fn(&[f64]) -> Complex64, f: &Field) -> Result<Field> {
    f.grid().require_kind(GridKind::PeriodicBox, "apply_multiplier")?;
    let mut spec = forward(f)?;
    let n = f.points();
    let mut symbol = vec![Complex64::new(0.0, 0.0); n];
    let mut bad = None;
    for_each_frequency(f.grid(), |p, xi| {
        let v = m(xi);
        if bad.is_none() && !(v.re.is_finite() && v.im.is_finite()) {
            bad = Some(non_finite(xi, v));
        }
        symbol[p] = v;
    });
    if let Some(e) = bad {
        return Err(e);
    }
    for c in 0..f.components() {
        for (v, s) in spec.component_mut(c).iter_mut().zip(&symbol) {
            *v *= s;
        }
    }
    inverse(&spec)
}

/// Applies a matrix-valued symbol: `sym(ξ, f̂(ξ), out)` fills the
/// `out_components` transformed output components at frequency `ξ`.
pub fn map_spectrum(
    f: &Field,
    out_components: usize,
    mut sym: impl FnMut(&[f64], &[Complex64], &mut [Complex64]),
) -> Result<Field> {
    f.grid().require_kind(GridKind::PeriodicBox, "map_spectrum")?;
    let spec = forward(f)?;
    let out = map_coefficients(&spec, out_components, &mut sym)?;
    inverse(&out)
}

/// Same as [`map_spectrum`] but acting on coefficients already transformed.
pub fn map_coefficients(
    spec: &Field,
    out_components: usize,
    sym: &mut impl FnMut(&[f64], &[Complex64], &mut [Complex64]),
) -> Result<Field> {
    let n = spec.points();
    let cin = spec.components();
    let mut out = Field::zeros(spec.grid(), out_components);
    let mut vin = vec![Complex64::new(0.0, 0.0); cin];
    let mut vout = vec![Complex64::new(0.0, 0.0); out_components];
    let mut bad = None;
    let src = spec.values();
    let dst = out.values_mut();
    for_each_frequency(spec.grid(), |p, xi| {
        for c in 0..cin {
            vin[c] = src[c * n + p];
        }
        vout.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        sym(xi, &vin, &mut vout);
        for c in 0..out_components {
            let v = vout[c];
            if bad.is_none() && !(v.re.is_finite() && v.im.is_finite()) {
                bad = Some(non_finite(xi, v));
            }
            dst[c * n + p] = v;
        }
    });
    match bad {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Spectral `∂_axis` of every component.
pub fn derivative(f: &Field, axis: usize) -> Result<Field> {
    if axis >= f.grid().dim() {
        return Err(invalid("axis", format!("{axis} out of range")));
    }
    apply_multiplier(|xi| I * xi[axis], f)
}

/// Gradient of a scalar field (N components).
pub fn gradient(f: &Field) -> Result<Field> {
    if f.components() != 1 {
        return Err(invalid("f", "gradient expects a scalar field"));
    }
    let d = f.grid().dim();
    map_spectrum(f, d, |xi, v, out| {
        for a in 0..d {
            out[a] = I * xi[a] * v[0];
        }
    })
}

/// Divergence of an N-component field.
pub fn divergence(u: &Field) -> Result<Field> {
    let d = u.grid().dim();
    if u.components() != d {
        return Err(invalid("u", "divergence expects one component per axis"));
    }
    map_spectrum(u, 1, |xi, v, out| {
        out[0] = (0..d).map(|a| I * xi[a] * v[a]).sum();
    })
}

pub fn laplacian(f: &Field) -> Result<Field> {
    apply_multiplier(|xi| Complex64::new(-xi.iter().map(|k| k * k).sum::<f64>(), 0.0), f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn box2() -> SpectralGrid {
        SpectralGrid::periodic(&[2.0 * PI, 2.0 * PI], &[16, 16]).unwrap()
    }

    #[test]
    fn identity_round_trip() {
        let g = box2();
        let f = Field::scalar_fn(&g, |x| Complex64::new(x[0].sin() * x[1].cos(), x[1]));
        let out = apply_multiplier(|_| Complex64::new(1.0, 0.0), &f).unwrap();
        assert!(out.sub(&f).unwrap().max_abs() < 1e-12 * f.max_abs());
    }

    #[test]
    fn bessel_potential_on_single_mode() {
        let g = box2();
        let f = Field::scalar_fn(&g, |x| Complex64::new(0.0, x[0]).exp());
        let out = apply_multiplier(|xi| Complex64::new(1.0 / (1.0 + xi[0] * xi[0] + xi[1] * xi[1]), 0.0), &f).unwrap();
        let expect = f.scaled(Complex64::new(0.5, 0.0));
        assert!(out.sub(&expect).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn derivative_of_sine() {
        let g = SpectralGrid::periodic(&[2.0 * PI], &[32]).unwrap();
        let f = Field::scalar_fn(&g, |x| Complex64::new(x[0].sin(), 0.0));
        let d = derivative(&f, 0).unwrap();
        let expect = Field::scalar_fn(&g, |x| Complex64::new(x[0].cos(), 0.0));
        assert!(d.sub(&expect).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn non_finite_symbol_names_frequency() {
        let g = box2();
        let f = Field::scalar_fn(&g, |_| Complex64::new(1.0, 0.0));
        let err = apply_multiplier(|xi| Complex64::new(1.0 / (xi[0] * xi[0] + xi[1] * xi[1]), 0.0), &f).unwrap_err();
        match err {
            LabError::NonFiniteSymbol { frequency, .. } => assert_eq!(frequency, vec![0.0, 0.0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn div_grad_is_laplacian() {
        let g = box2();
        let f = Field::scalar_fn(&g, |x| Complex64::new((2.0 * x[0]).sin() * x[1].cos(), 0.0));
        let a = divergence(&gradient(&f).unwrap()).unwrap();
        let b = laplacian(&f).unwrap();
        assert!(a.sub(&b).unwrap().max_abs() < 1e-12);
    }
}
