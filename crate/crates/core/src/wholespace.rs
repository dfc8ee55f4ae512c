//! Whole-space Lamé resolvent `S(λ)` as an explicit Fourier multiplier.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::ModelParams;
use crate::spectral::multiplier::{for_each_frequency, map_coefficients, map_spectrum};
use crate::spectral::norms::l2_norm;
use crate::spectral::{Field, GridKind, SectorPoint, SpectralGrid};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `û = ĝ/(λ+α|ξ|²) + β·iξ(iξ·ĝ)/((λ+α|ξ|²)(λ+(α+β)|ξ|²))` at one frequency.
pub fn lame_symbol(lambda: Complex64, alpha: f64, beta: f64, xi: &[f64], g: &[Complex64], out: &mut [Complex64]) {
    let xi2: f64 = xi.iter().map(|k| k * k).sum();
    let d1 = lambda + alpha * xi2;
    let d2 = lambda + (alpha + beta) * xi2;
    let div: Complex64 = xi.iter().zip(g).map(|(k, v)| I * k * v).sum();
    let coef = beta * div / (d1 * d2);
    for a in 0..xi.len() {
        out[a] = g[a] / d1 + I * xi[a] * coef;
    }
}

#[derive(Debug, Clone)]
pub struct WholeSpaceResolvent {
    alpha: f64,
    beta: f64,
    grid: SpectralGrid,
}

impl WholeSpaceResolvent {
    pub fn new(model: &ModelParams, grid: &SpectralGrid) -> Result<Self> {
        model.validate()?;
        grid.require_kind(GridKind::PeriodicBox, "whole-space resolvent")?;
        Ok(Self {
            alpha: model.alpha,
            beta: model.beta,
            grid: grid.clone(),
        })
    }

    pub fn with_coefficients(alpha: f64, beta: f64, grid: &SpectralGrid) -> Result<Self> {
        Self::new(&ModelParams::lame(alpha, beta)?, grid)
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn check_data(&self, g: &Field) -> Result<()> {
        if g.grid() != &self.grid {
            return Err(crate::error::LabError::GridMismatch("datum is not on the solver grid".into()));
        }
        if g.components() != self.grid.dim() {
            return Err(invalid("g", format!("expected {} components", self.grid.dim())));
        }
        Ok(())
    }

    /// `u = S(λ)g`.
    pub fn solve(&self, lambda: &SectorPoint, g: &Field) -> Result<Field> {
        self.solve_unchecked(lambda.lambda(), g)
    }

    /// Solve at a parameter already known to keep the symbol finite.
    pub(crate) fn solve_unchecked(&self, lambda: Complex64, g: &Field) -> Result<Field> {
        self.check_data(g)?;
        let (a, b) = (self.alpha, self.beta);
        map_spectrum(g, g.components(), |xi, v, out| lame_symbol(lambda, a, b, xi, v, out))
    }

    /// `S(λ)` applied to Fourier coefficients.
    pub fn solve_coefficients(&self, lambda: Complex64, spec: &Field) -> Result<Field> {
        self.check_data(spec)?;
        let (a, b) = (self.alpha, self.beta);
        map_coefficients(spec, spec.components(), &mut |xi, v, out| lame_symbol(lambda, a, b, xi, v, out))
    }

    /// `∂_λ S(λ)g = −S(λ)S(λ)g`.
    pub fn solve_derivative(&self, lambda: &SectorPoint, g: &Field) -> Result<Field> {
        let once = self.solve(lambda, g)?;
        Ok(self.solve(lambda, &once)?.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// `λu − αΔu − β∇div u` computed spectrally.
    pub fn apply_operator(&self, lambda: Complex64, u: &Field) -> Result<Field> {
        self.check_data(u)?;
        let (a, b) = (self.alpha, self.beta);
        map_spectrum(u, u.components(), |xi, v, out| {
            let xi2: f64 = xi.iter().map(|k| k * k).sum();
            let div: Complex64 = xi.iter().zip(v).map(|(k, w)| I * k * w).sum();
            for c in 0..xi.len() {
                out[c] = (lambda + a * xi2) * v[c] - b * I * xi[c] * div;
            }
        })
    }

    /// `‖λu − αΔu − β∇div u − g‖_2 / ‖g‖_2`.
    pub fn residual(&self, lambda: Complex64, u: &Field, g: &Field) -> Result<f64> {
        let r = self.apply_operator(lambda, u)?.sub(g)?;
        let base = l2_norm(g);
        Ok(if base > 0.0 { l2_norm(&r) / base } else { l2_norm(&r) })
    }
}

/// Extremes of `|λ+α|ξ|²|/(|λ|^{1/2}+|ξ|)²` and of the `α+β` variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolBounds {
    pub min: f64,
    pub max: f64,
    pub min_ab: f64,
    pub max_ab: f64,
}

impl SymbolBounds {
    pub fn merge(&self, o: &SymbolBounds) -> SymbolBounds {
        SymbolBounds {
            min: self.min.min(o.min),
            max: self.max.max(o.max),
            min_ab: self.min_ab.min(o.min_ab),
            max_ab: self.max_ab.max(o.max_ab),
        }
    }
}

pub fn symbol_ratio(lambda: Complex64, coef: f64, xi_abs: f64) -> f64 {
    (lambda + coef * xi_abs * xi_abs).norm() / (lambda.norm().sqrt() + xi_abs).powi(2)
}

/// Sweeps the frequencies of `grid` at one sector point.
pub fn check_symbol_bounds(lambda: &SectorPoint, model: &ModelParams, grid: &SpectralGrid) -> Result<SymbolBounds> {
    model.validate()?;
    let l = lambda.lambda();
    let ab = model.alpha + model.beta;
    let mut b = SymbolBounds {
        min: f64::INFINITY,
        max: 0.0,
        min_ab: f64::INFINITY,
        max_ab: 0.0,
    };
    for_each_frequency(grid, |_, xi| {
        let x = xi.iter().map(|k| k * k).sum::<f64>().sqrt();
        let r1 = symbol_ratio(l, model.alpha, x);
        let r2 = symbol_ratio(l, ab, x);
        b.min = b.min.min(r1);
        b.max = b.max.max(r1);
        b.min_ab = b.min_ab.min(r2);
        b.max_ab = b.max_ab.max(r2);
    });
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::SectorParams;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn sector() -> SectorParams {
        SectorParams::new(FRAC_PI_4, 0.5).unwrap()
    }

    #[test]
    fn single_mode_closed_form() {
        let g2 = SpectralGrid::periodic(&[2.0 * PI, 2.0 * PI], &[16, 16]).unwrap();
        let s = WholeSpaceResolvent::with_coefficients(1.0, 1.0, &g2).unwrap();
        let g = Field::from_fn(&g2, 2, |x, out| out[0] = Complex64::new(0.0, x[0]).exp());
        let u = s.solve(&sector().polar(1.0, 0.0).unwrap(), &g).unwrap();
        let expect = g.scaled(Complex64::new(1.0 / 3.0, 0.0));
        assert!(u.sub(&expect).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn large_lambda_uniform_bound() {
        let g2 = SpectralGrid::periodic(&[2.0 * PI, 2.0 * PI], &[16, 16]).unwrap();
        let s = WholeSpaceResolvent::with_coefficients(1.0, 0.0, &g2).unwrap();
        let g = Field::from_fn(&g2, 2, |x, out| out[0] = Complex64::new(0.0, x[0]).exp());
        let u = s.solve(&sector().polar(100.0, 0.0).unwrap(), &g).unwrap();
        let ratio = 100.0 * l2_norm(&u) / l2_norm(&g);
        assert!((ratio - 100.0 / 101.0).abs() < 1e-12);
    }

    #[test]
    fn symbol_ratio_arithmetic() {
        let r = symbol_ratio(Complex64::new(0.0, 4.0), 1.0, 2.0);
        assert!((r - 2f64.sqrt() / 4.0).abs() < 1e-15);
        assert!((symbol_ratio(Complex64::new(7.0, 0.0), 1.0, 0.0) - 1.0).abs() < 1e-15);
    }
}
