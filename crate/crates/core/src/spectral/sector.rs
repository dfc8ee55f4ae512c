//! Parabolic sectors of admissible spectral parameters.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{invalid, LabError, Result};

/// Relative slack used when testing points placed exactly on the sector edge.
const EDGE_SLACK: f64 = 1e-12;

/// Opening data of the sector `{|arg λ| ≤ π − ε, |λ| ≥ λ0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorParams {
    epsilon: f64,
    lambda0: f64,
}

impl SectorParams {
    pub fn new(epsilon: f64, lambda0: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < FRAC_PI_2) {
            return Err(invalid("epsilon", format!("{epsilon} not in (0, pi/2)")));
        }
        if !(lambda0 > 0.0 && lambda0.is_finite()) {
            return Err(invalid("lambda0", format!("{lambda0} must be positive")));
        }
        Ok(Self { epsilon, lambda0 })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// Largest admissible argument, `π − ε`.
    pub fn max_arg(&self) -> f64 {
        PI - self.epsilon
    }

    pub fn contains(&self, lambda: Complex64) -> bool {
        sector_contains(lambda, self)
    }

    pub fn point(&self, lambda: Complex64) -> Result<SectorPoint> {
        SectorPoint::new(lambda, *self)
    }

    /// The point `modulus · e^{i arg}`.
    pub fn polar(&self, modulus: f64, arg: f64) -> Result<SectorPoint> {
        self.point(Complex64::from_polar(modulus, arg))
    }

    /// Same opening angle with a different threshold.
    pub fn with_lambda0(&self, lambda0: f64) -> Result<Self> {
        Self::new(self.epsilon, lambda0)
    }
}

/// True iff `|arg λ| ≤ π − ε` and `|λ| ≥ λ0`.
///
/// Points on the boundary rays are accepted up to a relative slack of `1e-12`
/// so that `λ0·e^{±i(π−ε)}` built with `from_polar` is admissible.
pub fn sector_contains(lambda: Complex64, params: &SectorParams) -> bool {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return false;
    }
    let modulus = lambda.norm();
    if modulus == 0.0 {
        return false;
    }
    let arg_ok = lambda.arg().abs() <= params.max_arg() * (1.0 + EDGE_SLACK);
    let mod_ok = modulus >= params.lambda0 * (1.0 - EDGE_SLACK);
    arg_ok && mod_ok
}

/// A spectral parameter known to lie in its sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorPoint {
    lambda: Complex64,
    params: SectorParams,
}

impl SectorPoint {
    pub fn new(lambda: Complex64, params: SectorParams) -> Result<Self> {
        if !sector_contains(lambda, &params) {
            return Err(LabError::OutsideSector {
                lambda,
                epsilon: params.epsilon,
                lambda0: params.lambda0,
            });
        }
        Ok(Self { lambda, params })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn params(&self) -> SectorParams {
        self.params
    }

    pub fn modulus(&self) -> f64 {
        self.lambda.norm()
    }

    pub fn arg(&self) -> f64 {
        self.lambda.arg()
    }

    /// Principal square root; its argument lies in `[-(π−ε)/2, (π−ε)/2]`.
    pub fn sqrt(&self) -> Complex64 {
        self.lambda.sqrt()
    }

    /// The point `c·λ` for a real `c > 0`, checked against a rescaled threshold.
    pub fn scaled(&self, factor: f64) -> Result<SectorPoint> {
        if !(factor > 0.0) {
            return Err(invalid("factor", "scaling must be positive"));
        }
        let params = self.params.with_lambda0(self.params.lambda0 * factor)?;
        SectorPoint::new(self.lambda * factor, params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn quarter() -> SectorParams {
        SectorParams::new(FRAC_PI_4, 1.0).unwrap()
    }

    #[test]
    fn positive_axis_inside() {
        assert!(sector_contains(Complex64::new(2.0, 0.0), &quarter()));
    }

    #[test]
    fn negative_axis_excluded() {
        assert!(!sector_contains(Complex64::new(-1.0, 0.0), &quarter()));
    }

    #[test]
    fn below_threshold_excluded() {
        assert!(!sector_contains(Complex64::new(0.5, 0.0), &quarter()));
    }

    #[test]
    fn edge_rays_admissible() {
        let p = quarter();
        assert!(p.polar(1.0, p.max_arg()).is_ok());
        assert!(p.polar(1.0, -p.max_arg()).is_ok());
        assert!(p.polar(1.0, p.max_arg() + 1e-6).is_err());
    }

    #[test]
    fn rejects_bad_params() {
        assert!(SectorParams::new(0.0, 1.0).is_err());
        assert!(SectorParams::new(FRAC_PI_2, 1.0).is_err());
        assert!(SectorParams::new(0.3, 0.0).is_err());
    }

    #[test]
    fn zero_is_never_inside() {
        let p = SectorParams::new(0.1, 1e-300).unwrap();
        assert!(!sector_contains(Complex64::new(0.0, 0.0), &p));
    }
}
