//! Characteristic roots, the Lopatinski determinant and the kernel `M`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::model::ModelParams;
use crate::spectral::SectorPoint;

/// `A = √(λ/(α+β)+|ξ'|²)`, `B = √(λ/α+|ξ'|²)`, `L = (α+β)A + αB`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicRoots {
    pub a: Complex64,
    pub b: Complex64,
    pub l: Complex64,
}

impl CharacteristicRoots {
    /// Roots given directly (used by kernel tests and quadrature checks).
    pub fn from_values(a: Complex64, b: Complex64, alpha: f64, beta: f64) -> Result<Self> {
        if !(a.re > 0.0 && b.re > 0.0) {
            return Err(LabError::BranchViolation(format!("Re A = {}, Re B = {}", a.re, b.re)));
        }
        Ok(Self {
            a,
            b,
            l: (alpha + beta) * a + alpha * b,
        })
    }

    /// `|L|/(|λ|^{1/2}+|ξ'|)`.
    pub fn lopatinski_ratio(&self, lambda: Complex64, xi_prime_abs: f64) -> f64 {
        self.l.norm() / (lambda.norm().sqrt() + xi_prime_abs)
    }
}

pub fn characteristic_roots(lambda: &SectorPoint, xi_prime_sq: f64, model: &ModelParams) -> Result<CharacteristicRoots> {
    roots_at(lambda.lambda(), xi_prime_sq, model.alpha, model.beta)
}

/// Principal square roots at a raw parameter; fails if a branch leaves
/// the right half-plane.
pub fn roots_at(lambda: Complex64, xi_prime_sq: f64, alpha: f64, beta: f64) -> Result<CharacteristicRoots> {
    let a = (lambda / (alpha + beta) + xi_prime_sq).sqrt();
    let b = (lambda / alpha + xi_prime_sq).sqrt();
    CharacteristicRoots::from_values(a, b, alpha, beta)
}

/// `(e^z − 1)/z`, by Taylor series near zero.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 0.1 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..20 {
            term *= z / k as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `M(x) = (e^{−Bx} − e^{−Ax})/(B − A)`, continuous through `A = B`
/// where it equals `−x·e^{−Bx}`.
///
/// Written as `−x·e^{−Bx}·φ1((B−A)x)`, which never divides by a small
/// difference.
pub fn stable_m(x: f64, roots: &CharacteristicRoots) -> Complex64 {
    if x == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let eb = (-roots.b * x).exp();
    -x * eb * phi1((roots.b - roots.a) * x)
}

/// `M` together with `e^{−Bx}` and `e^{−Ax}`.
#[derive(Debug, Clone, Copy)]
pub struct KernelValues {
    pub eb: Complex64,
    pub ea: Complex64,
    pub m: Complex64,
}

pub fn kernel_values(x: f64, roots: &CharacteristicRoots) -> KernelValues {
    KernelValues {
        eb: (-roots.b * x).exp(),
        ea: (-roots.a * x).exp(),
        m: stable_m(x, roots),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn roots_example() {
        let r = roots_at(c(4.0), 0.0, 1.0, 3.0).unwrap();
        assert!((r.a - c(1.0)).norm() < 1e-15);
        assert!((r.b - c(2.0)).norm() < 1e-15);
        assert!((r.l - c(6.0)).norm() < 1e-14);
        assert!((r.lopatinski_ratio(c(4.0), 0.0) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn equal_roots_when_beta_vanishes() {
        let r = roots_at(Complex64::new(2.0, 5.0), 3.0, 1.5, 0.0).unwrap();
        assert_eq!(r.a, r.b);
    }

    #[test]
    fn m_values() {
        let r = CharacteristicRoots::from_values(c(1.0), c(2.0), 1.0, 0.0).unwrap();
        assert!((stable_m(1.0, &r) - c(-0.232_544_157_934_829_6)).norm() < 1e-15);
        let same = CharacteristicRoots::from_values(c(1.0), c(1.0), 1.0, 0.0).unwrap();
        assert!((stable_m(1.0, &same) + c((-1.0f64).exp())).norm() < 1e-15);
        let near = CharacteristicRoots::from_values(c(1.0), c(1.0 + 1e-9), 1.0, 0.0).unwrap();
        let oracle = -0.367_879_440_987_502_6;
        assert!((stable_m(1.0, &near) - c(oracle)).norm() < 1e-12);
    }

    #[test]
    fn derivative_identity() {
        let r = CharacteristicRoots::from_values(Complex64::new(1.3, 0.4), Complex64::new(0.9, -0.2), 1.0, 0.5).unwrap();
        let (x, h) = (0.7, 1e-5);
        let d = (stable_m(x + h, &r) - stable_m(x - h, &r)) / (2.0 * h);
        let expect = -(-r.b * x).exp() - r.a * stable_m(x, &r);
        assert!((d - expect).norm() < 1e-9);
    }
}
