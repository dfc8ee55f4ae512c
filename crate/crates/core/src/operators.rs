//! Domain-agnostic handles on Lamé solutions and their exact derivatives.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::halfspace::{HalfSpaceRep, HalfSpaceResolvent, LayerBasis};
use crate::model::ModelParams;
use crate::spectral::extension::{extend, restrict, Parity};
use crate::spectral::multiplier::{for_each_frequency, gradient};
use crate::spectral::transform::{forward, inverse};
use crate::spectral::{Field, GridKind, SpectralGrid};
use crate::wholespace::WholeSpaceResolvent;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    WholeSpace,
    HalfSpace,
}

/// A solver output that can be differentiated without further discretization
/// error: Fourier coefficients on a periodic box, or a half-space
/// representation.
#[derive(Debug, Clone)]
pub enum Repr {
    Periodic(Field),
    Half(HalfSpaceRep),
}

impl Repr {
    pub fn components(&self) -> usize {
        match self {
            Repr::Periodic(s) => s.components(),
            Repr::Half(r) => r.components(),
        }
    }

    pub fn grid(&self) -> &SpectralGrid {
        match self {
            Repr::Periodic(s) => s.grid(),
            Repr::Half(r) => r.grid(),
        }
    }

    pub fn evaluate(&self) -> Result<Field> {
        match self {
            Repr::Periodic(s) => inverse(s),
            Repr::Half(r) => r.evaluate(),
        }
    }

    pub fn derivative(&self, axis: usize) -> Result<Repr> {
        match self {
            Repr::Periodic(s) => {
                if axis >= s.grid().dim() {
                    return Err(invalid("axis", format!("{axis} out of range")));
                }
                let mut out = s.clone();
                let mut sym = vec![Complex64::new(0.0, 0.0); s.points()];
                for_each_frequency(s.grid(), |p, xi| sym[p] = I * xi[axis]);
                for c in 0..out.components() {
                    for (v, m) in out.component_mut(c).iter_mut().zip(&sym) {
                        *v *= m;
                    }
                }
                Ok(Repr::Periodic(out))
            }
            Repr::Half(r) => Ok(Repr::Half(r.derivative(axis)?)),
        }
    }

    pub fn component(&self, c: usize) -> Repr {
        match self {
            Repr::Periodic(s) => Repr::Periodic(s.extract(c)),
            Repr::Half(r) => Repr::Half(r.component(c)),
        }
    }

    pub fn axpy(&self, a: Complex64, other: &Repr) -> Result<Repr> {
        match (self, other) {
            (Repr::Periodic(x), Repr::Periodic(y)) => {
                let mut out = x.clone();
                out.axpy(a, y)?;
                Ok(Repr::Periodic(out))
            }
            (Repr::Half(x), Repr::Half(y)) => Ok(Repr::Half(x.axpy(a, y)?)),
            _ => Err(LabError::GridMismatch("mixed representations".into())),
        }
    }

    pub fn scaled(&self, a: Complex64) -> Repr {
        match self {
            Repr::Periodic(s) => Repr::Periodic(s.scaled(a)),
            Repr::Half(r) => Repr::Half(r.scaled(a)),
        }
    }

    pub fn stack(parts: &[Repr]) -> Result<Repr> {
        match parts.first() {
            None => Err(invalid("parts", "empty stack")),
            Some(Repr::Periodic(_)) => {
                let fields = parts
                    .iter()
                    .map(|p| match p {
                        Repr::Periodic(s) => Ok(s),
                        Repr::Half(_) => Err(LabError::GridMismatch("mixed representations".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Repr::Periodic(Field::stack(&fields)?))
            }
            Some(Repr::Half(_)) => {
                let reps = parts
                    .iter()
                    .map(|p| match p {
                        Repr::Half(r) => Ok(r.clone()),
                        Repr::Periodic(_) => Err(LabError::GridMismatch("mixed representations".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Repr::Half(HalfSpaceRep::stack(&reps)?))
            }
        }
    }

    pub fn divergence(&self) -> Result<Repr> {
        let d = self.grid().dim();
        if self.components() != d {
            return Err(invalid("repr", "divergence expects N components"));
        }
        let mut acc = self.component(0).derivative(0)?;
        for a in 1..d {
            acc = acc.axpy(Complex64::new(1.0, 0.0), &self.component(a).derivative(a)?)?;
        }
        Ok(acc)
    }

    /// First derivatives `∂_a` of every component, `a`-major.
    pub fn jacobian(&self) -> Result<Repr> {
        let parts = (0..self.grid().dim())
            .map(|a| self.derivative(a))
            .collect::<Result<Vec<_>>>()?;
        Self::stack(&parts)
    }

    /// `(λ, λ^{1/2}∇̄, ∇̄²)u` with `∇̄f = (f, ∇f)` and `∇̄²f = (f, ∇f, ∇²f)`.
    pub fn resolvent_stack(&self, lambda: Complex64) -> Result<Repr> {
        let sq = lambda.sqrt();
        let jac = self.jacobian()?;
        let hess = jac.jacobian()?;
        Self::stack(&[
            self.scaled(lambda),
            self.scaled(sq),
            jac.scaled(sq),
            self.clone(),
            jac,
            hess,
        ])
    }

    /// `(λ^{1/2}∇̄, ∇̄²)u`.
    pub fn gradient_stack(&self, lambda: Complex64) -> Result<Repr> {
        let sq = lambda.sqrt();
        let jac = self.jacobian()?;
        let hess = jac.jacobian()?;
        Self::stack(&[self.scaled(sq), jac.scaled(sq), self.clone(), jac, hess])
    }

    /// `(1, λ^{−1/2}∇̄)u`.
    pub fn low_stack(&self, lambda: Complex64) -> Result<Repr> {
        let isq = 1.0 / lambda.sqrt();
        let jac = self.jacobian()?;
        Self::stack(&[self.clone(), self.scaled(isq), jac.scaled(isq)])
    }

    /// `λu − αΔu − β∇div u`.
    pub fn lame_operator(&self, lambda: Complex64, alpha: f64, beta: f64) -> Result<Repr> {
        let d = self.grid().dim();
        let mut lap = self.derivative(0)?.derivative(0)?;
        for a in 1..d {
            lap = lap.axpy(Complex64::new(1.0, 0.0), &self.derivative(a)?.derivative(a)?)?;
        }
        let div = self.divergence()?;
        let grad_div = Self::stack(&(0..d).map(|a| div.derivative(a)).collect::<Result<Vec<_>>>()?)?;
        self.scaled(lambda)
            .axpy(Complex64::new(-alpha, 0.0), &lap)?
            .axpy(Complex64::new(-beta, 0.0), &grad_div)
    }
}

/// Lamé solver on either domain.
#[derive(Debug, Clone)]
pub enum LameSolver {
    Whole(WholeSpaceResolvent),
    Half(HalfSpaceResolvent),
}

impl LameSolver {
    pub fn new(model: &ModelParams, grid: &SpectralGrid) -> Result<Self> {
        match grid.kind() {
            GridKind::PeriodicBox => Ok(Self::Whole(WholeSpaceResolvent::new(model, grid)?)),
            GridKind::HalfSpace => Ok(Self::Half(HalfSpaceResolvent::new(model, grid)?)),
        }
    }

    pub fn grid(&self) -> &SpectralGrid {
        match self {
            Self::Whole(s) => s.grid(),
            Self::Half(s) => s.grid(),
        }
    }

    pub fn alpha(&self) -> f64 {
        match self {
            Self::Whole(s) => s.alpha(),
            Self::Half(s) => s.alpha(),
        }
    }

    pub fn beta(&self) -> f64 {
        match self {
            Self::Whole(s) => s.beta(),
            Self::Half(s) => s.beta(),
        }
    }

    /// Fixes `λ` so repeated solves share one boundary-layer basis and their
    /// representations can be summed.
    pub fn prepare(&self, lambda: Complex64) -> Result<PreparedLame<'_>> {
        let basis = match self {
            Self::Whole(_) => None,
            Self::Half(s) => Some(s.layer_basis(lambda)?),
        };
        Ok(PreparedLame { solver: self, lambda, basis })
    }

    /// `S(λ)g` as a representation.
    pub fn solve_repr(&self, lambda: Complex64, g: &Field) -> Result<Repr> {
        self.prepare(lambda)?.solve(g)
    }

    /// `∂_λS(λ)g = −S(λ)²g`.
    pub fn solve_derivative_repr(&self, lambda: Complex64, g: &Field) -> Result<Repr> {
        let p = self.prepare(lambda)?;
        let once = p.solve(g)?.evaluate()?;
        Ok(p.solve(&once)?.scaled(Complex64::new(-1.0, 0.0)))
    }
}

/// A [`LameSolver`] at a fixed `λ`.
pub struct PreparedLame<'a> {
    solver: &'a LameSolver,
    lambda: Complex64,
    basis: Option<Arc<LayerBasis>>,
}

impl PreparedLame<'_> {
    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn solve(&self, g: &Field) -> Result<Repr> {
        match (self.solver, &self.basis) {
            (LameSolver::Whole(s), _) => Ok(Repr::Periodic(s.solve_coefficients(self.lambda, &forward(g)?)?)),
            (LameSolver::Half(s), Some(b)) => Ok(Repr::Half(s.solve_rep_in(b, g)?)),
            (LameSolver::Half(_), None) => unreachable!("half-space solvers always carry a basis"),
        }
    }
}

/// Gradient of a scalar grid function: spectral on periodic boxes, spectral
/// after even reflection on half-spaces.
pub fn field_gradient(f: &Field) -> Result<Field> {
    match f.grid().kind() {
        GridKind::PeriodicBox => gradient(f),
        GridKind::HalfSpace => {
            let e = extend(f, &[Parity::Even])?;
            restrict(&gradient(&e)?, f.grid())
        }
    }
}
