//! Physical coefficients of the linearized system.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::spectral::Field;

/// Barotropic pressure law through its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PressureLaw {
    /// `P'(η) ≡ p_prime`.
    Linear { p_prime: f64 },
    /// `P'(η) = p_prime·(η/ρ*)^{γ−1}`, i.e. `P(η) ∝ η^γ`.
    Polytropic { p_prime: f64, gamma: f64 },
}

#[derive(Debug, Clone)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub rho_star: f64,
    pub pressure: PressureLaw,
    /// Density perturbation `η̃0`, so that `η0 = ρ* + η̃0`.
    pub eta_tilde: Option<Field>,
    pub rho1: f64,
    pub rho2: f64,
}

impl ModelParams {
    /// Constant-density model with `ρ1 = ρ*/2`, `ρ2 = 2ρ*`.
    pub fn new(alpha: f64, beta: f64, rho_star: f64, p_prime: f64) -> Result<Self> {
        let m = Self {
            alpha,
            beta,
            rho_star,
            pressure: PressureLaw::Linear { p_prime },
            eta_tilde: None,
            rho1: 0.5 * rho_star,
            rho2: 2.0 * rho_star,
        };
        m.validate()?;
        Ok(m)
    }

    /// Lamé-only model (`ρ* = 1`, `P' = 1`).
    pub fn lame(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, 1.0, 1.0)
    }

    pub fn with_pressure(mut self, pressure: PressureLaw) -> Result<Self> {
        self.pressure = pressure;
        self.validate()?;
        Ok(self)
    }

    pub fn with_bounds(mut self, rho1: f64, rho2: f64) -> Result<Self> {
        self.rho1 = rho1;
        self.rho2 = rho2;
        self.validate()?;
        Ok(self)
    }

    pub fn with_eta_tilde(mut self, eta: Field) -> Result<Self> {
        if eta.components() != 1 {
            return Err(invalid("eta_tilde", "must be a scalar field"));
        }
        self.eta_tilde = Some(eta);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(invalid("alpha", format!("{} must be positive", self.alpha)));
        }
        if !(self.alpha + self.beta > 0.0) {
            return Err(invalid("beta", format!("alpha + beta = {} must be positive", self.alpha + self.beta)));
        }
        if !(self.rho_star > 0.0) {
            return Err(invalid("rho_star", "must be positive"));
        }
        let (p, gamma) = match self.pressure {
            PressureLaw::Linear { p_prime } => (p_prime, 1.0),
            PressureLaw::Polytropic { p_prime, gamma } => (p_prime, gamma),
        };
        if !(p > 0.0) || !(gamma >= 1.0) {
            return Err(invalid("pressure", "need P' > 0 and gamma >= 1"));
        }
        if !(self.rho1 > 0.0 && self.rho1 < self.rho_star && self.rho_star < self.rho2) {
            return Err(invalid(
                "rho_star",
                format!("need rho1 < rho* < rho2, got {} < {} < {}", self.rho1, self.rho_star, self.rho2),
            ));
        }
        if let Some(eta) = &self.eta_tilde {
            for v in eta.values() {
                if v.im.abs() > 1e-14 * v.re.abs().max(1.0) {
                    return Err(invalid("eta_tilde", "density perturbation must be real"));
                }
                let e = self.rho_star + v.re;
                if !(e > self.rho1 && e < self.rho2) {
                    return Err(invalid(
                        "eta_tilde",
                        format!("eta0 = {e} leaves ({}, {})", self.rho1, self.rho2),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn is_constant_density(&self) -> bool {
        self.eta_tilde.is_none()
    }

    /// `P'(η)` for a density value.
    pub fn p_prime_at(&self, eta: f64) -> f64 {
        match self.pressure {
            PressureLaw::Linear { p_prime } => p_prime,
            PressureLaw::Polytropic { p_prime, gamma } => p_prime * (eta / self.rho_star).powf(gamma - 1.0),
        }
    }

    /// `η0` sampled on the grid of `like` (constant `ρ*` when no perturbation).
    pub fn eta0_field(&self, like: &Field) -> Result<Field> {
        match &self.eta_tilde {
            Some(eta) => {
                eta.check_same_grid(like)?;
                Ok(eta.map(|v| v + self.rho_star))
            }
            None => Ok(Field::scalar_fn(like.grid(), |_| Complex64::new(self.rho_star, 0.0))),
        }
    }

    /// Pointwise `P'(η0)` as a scalar field.
    pub fn p_prime_field(&self, like: &Field) -> Result<Field> {
        let eta = self.eta0_field(like)?;
        Ok(eta.map(|v| Complex64::new(self.p_prime_at(v.re), 0.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_window() {
        assert!(ModelParams::lame(1.0, 0.0).is_ok());
        assert!(ModelParams::lame(0.0, 1.0).is_err());
        assert!(ModelParams::lame(1.0, -1.0).is_err());
        assert!(ModelParams::lame(1.0, -0.5).is_ok());
    }

    #[test]
    fn polytropic_derivative() {
        let m = ModelParams::new(1.0, 0.0, 2.0, 3.0)
            .unwrap()
            .with_pressure(PressureLaw::Polytropic { p_prime: 3.0, gamma: 2.0 })
            .unwrap();
        assert!((m.p_prime_at(2.0) - 3.0).abs() < 1e-15);
        assert!((m.p_prime_at(3.0) - 4.5).abs() < 1e-15);
    }
}
