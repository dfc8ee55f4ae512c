//! Complex grid functions with one or more components.

use num_complex::Complex64;

use super::grid::SpectralGrid;
use crate::error::{invalid, LabError, Result};

/// Values are stored component-major: component `c` occupies
/// `values[c·n .. (c+1)·n]` with `n` the number of grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: SpectralGrid,
    components: usize,
    values: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: &SpectralGrid, components: usize) -> Self {
        assert!(components >= 1, "a field needs at least one component");
        Self {
            grid: grid.clone(),
            components,
            values: vec![Complex64::new(0.0, 0.0); components * grid.total_points()],
        }
    }

    pub fn from_values(grid: &SpectralGrid, components: usize, values: Vec<Complex64>) -> Result<Self> {
        if components == 0 {
            return Err(invalid("components", "must be at least 1"));
        }
        if values.len() != components * grid.total_points() {
            return Err(LabError::GridMismatch(format!(
                "{} values for {} components on {} points",
                values.len(),
                components,
                grid.total_points()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(invalid("values", format!("non-finite entry at index {i}")));
        }
        Ok(Self {
            grid: grid.clone(),
            components,
            values,
        })
    }

    /// Samples `f(x, out)` at every grid point; `out` has one slot per component.
    pub fn from_fn<F>(grid: &SpectralGrid, components: usize, mut f: F) -> Self
    where
        F: FnMut(&[f64], &mut [Complex64]),
    {
        let mut field = Self::zeros(grid, components);
        let n = grid.total_points();
        let d = grid.dim();
        let coords: Vec<Vec<f64>> = (0..d).map(|a| grid.coords(a)).collect();
        let mut idx = vec![0usize; d];
        let mut x = vec![0.0; d];
        let mut out = vec![Complex64::new(0.0, 0.0); components];
        for p in 0..n {
            grid.unravel(p, &mut idx);
            for a in 0..d {
                x[a] = coords[a][idx[a]];
            }
            out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
            f(&x, &mut out);
            for c in 0..components {
                field.values[c * n + p] = out[c];
            }
        }
        field
    }

    /// Scalar field sampled from `f(x)`.
    pub fn scalar_fn<F>(grid: &SpectralGrid, mut f: F) -> Self
    where
        F: FnMut(&[f64]) -> Complex64,
    {
        Self::from_fn(grid, 1, |x, out| out[0] = f(x))
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn points(&self) -> usize {
        self.grid.total_points()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.points();
        &self.values[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.points();
        &mut self.values[c * n..(c + 1) * n]
    }

    /// Copy of a single component as a scalar field.
    pub fn extract(&self, c: usize) -> Field {
        Field {
            grid: self.grid.clone(),
            components: 1,
            values: self.component(c).to_vec(),
        }
    }

    /// Stacks the components of several fields on the same grid.
    pub fn stack(parts: &[&Field]) -> Result<Field> {
        let first = parts.first().ok_or_else(|| invalid("parts", "empty stack"))?;
        let mut values = Vec::new();
        let mut comps = 0;
        for p in parts {
            first.check_same_grid(p)?;
            values.extend_from_slice(&p.values);
            comps += p.components;
        }
        Ok(Field {
            grid: first.grid.clone(),
            components: comps,
            values,
        })
    }

    pub fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(LabError::GridMismatch("fields live on different grids".into()));
        }
        Ok(())
    }

    pub fn check_shape(&self, other: &Field) -> Result<()> {
        self.check_same_grid(other)?;
        if self.components != other.components {
            return Err(LabError::GridMismatch(format!(
                "component counts differ: {} vs {}",
                self.components, other.components
            )));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn scale(&mut self, s: Complex64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    pub fn scaled(&self, s: Complex64) -> Field {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// `self += a·other`.
    pub fn axpy(&mut self, a: Complex64, other: &Field) -> Result<()> {
        self.check_shape(other)?;
        for (v, w) in self.values.iter_mut().zip(&other.values) {
            *v += a * w;
        }
        Ok(())
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other)?;
        Ok(out)
    }

    /// Pointwise product with a scalar field, applied to every component.
    pub fn mul_scalar_field(&self, s: &Field) -> Result<Field> {
        self.check_same_grid(s)?;
        if s.components != 1 {
            return Err(invalid("s", "expected a scalar field"));
        }
        let n = self.points();
        let mut out = self.clone();
        for c in 0..self.components {
            for (v, w) in out.values[c * n..(c + 1) * n].iter_mut().zip(&s.values) {
                *v *= w;
            }
        }
        Ok(out)
    }

    /// Applies `f` pointwise to every value.
    pub fn map(&self, mut f: impl FnMut(Complex64) -> Complex64) -> Field {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = f(*v));
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}
