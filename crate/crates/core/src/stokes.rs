//! Linearized compressible Stokes resolvent
//!
//! ```text
//! λρ + η0 div u = f
//! η0 λu − αΔu − β∇div u + ∇(P'(η0)ρ) = g
//! ```
//!
//! reduced to a Lamé problem for `u` through `ρ = λ⁻¹(f − η0 div u)` and a
//! Neumann series in the pressure coupling.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, LabError, Result};
use crate::halfspace::solver::{interior_l2, wall_max};
use crate::model::ModelParams;
use crate::operators::{field_gradient, LameSolver, PreparedLame, Repr};
use crate::spectral::multiplier::map_coefficients;
use crate::spectral::norms::l2_norm;
use crate::spectral::transform::forward;
use crate::spectral::{Field, GridKind, SectorPoint, SpectralGrid};
use crate::wholespace::lame_symbol;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Outcome of a Neumann inversion of `I − K`.
#[derive(Debug, Clone)]
pub struct NeumannReport {
    pub value: Field,
    pub terms: usize,
    /// Largest observed ratio `‖K t‖/‖t‖` between successive terms.
    pub kappa: f64,
    /// `‖(I − K)value − h‖/‖h‖`.
    pub residual: f64,
}

/// Sums `Σ K^ℓ h` until the newest term drops below `tol·‖h‖`.
pub fn neumann_invert(
    op: &dyn Fn(&Field) -> Result<Field>,
    h: &Field,
    tol: f64,
    max_terms: usize,
) -> Result<NeumannReport> {
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let hn = l2_norm(h);
    if hn == 0.0 {
        return Ok(NeumannReport { value: h.clone(), terms: 0, kappa: 0.0, residual: 0.0 });
    }
    let mut value = h.clone();
    let mut term = h.clone();
    let mut tn = hn;
    let mut kappa: f64 = 0.0;
    let mut terms = 1;
    while tn > tol * hn {
        if terms > max_terms {
            return Err(LabError::ContractionFailure { kappa, terms });
        }
        let next = op(&term)?;
        let nn = l2_norm(&next);
        kappa = kappa.max(nn / tn);
        if kappa >= 1.0 {
            return Err(LabError::ContractionFailure { kappa, terms });
        }
        value.axpy(ONE, &next)?;
        term = next;
        tn = nn;
        terms += 1;
    }
    let r = value.sub(&op(&value)?)?.sub(h)?;
    let residual = l2_norm(&r) / hn;
    if residual > 10.0 * tol {
        return Err(LabError::ContractionFailure { kappa, terms });
    }
    Ok(NeumannReport { value, terms, kappa, residual })
}

/// Solution of the Stokes resolvent problem with its diagnostics.
#[derive(Debug, Clone)]
pub struct StokesSolution {
    pub lambda: Complex64,
    pub rho: Field,
    pub u: Field,
    pub u_repr: Repr,
    /// `‖λρ + η0 div u − f‖ / (‖f‖ + ‖g‖)`.
    pub mass_residual: f64,
    /// Relative residual of the momentum equation.
    pub momentum_residual: f64,
    /// `max|u(x', 0)| / (‖f‖ + ‖g‖)`, zero on periodic boxes.
    pub trace_residual: f64,
    pub neumann_terms: usize,
    pub kappa: f64,
}

/// `C_m(λ)(f,g) = ρ`, `B_v(λ)g` and `C_v(λ)(f,g)` with `u = B_v g + C_v(f,g)`.
#[derive(Debug, Clone)]
pub struct OperatorSplit {
    pub c_m: Field,
    pub b_v: Repr,
    pub c_v: Repr,
}

/// Contraction estimate at one modulus.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KappaSample {
    pub modulus: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lambda3Report {
    pub lambda3: f64,
    pub samples: Vec<KappaSample>,
}

#[derive(Debug, Clone)]
pub struct StokesResolvent {
    model: ModelParams,
    lame: LameSolver,
    eta0: Field,
    p_prime: Field,
    p_eta: Field,
    tol: f64,
    max_terms: usize,
}

impl StokesResolvent {
    pub fn new(model: &ModelParams, grid: &SpectralGrid) -> Result<Self> {
        model.validate()?;
        if let Some(eta) = &model.eta_tilde {
            if eta.grid() != grid {
                return Err(LabError::GridMismatch("density perturbation is not on the solver grid".into()));
            }
        }
        let like = Field::zeros(grid, 1);
        let eta0 = model.eta0_field(&like)?;
        let p_prime = model.p_prime_field(&like)?;
        let p_eta = p_prime.mul_scalar_field(&eta0)?;
        Ok(Self {
            model: model.clone(),
            lame: LameSolver::new(model, grid)?,
            eta0,
            p_prime,
            p_eta,
            tol: 1e-12,
            max_terms: 400,
        })
    }

    pub fn with_tolerance(mut self, tol: f64, max_terms: usize) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) || max_terms == 0 {
            return Err(invalid("tol", "need 0 < tol < 1 and max_terms > 0"));
        }
        self.tol = tol;
        self.max_terms = max_terms;
        Ok(self)
    }

    pub fn grid(&self) -> &SpectralGrid {
        self.lame.grid()
    }

    pub fn model(&self) -> &ModelParams {
        &self.model
    }

    pub fn lame(&self) -> &LameSolver {
        &self.lame
    }

    /// `η0 = ρ* + η̃` on the solver grid.
    pub fn eta0(&self) -> &Field {
        &self.eta0
    }

    /// `P'(η0)` on the solver grid.
    pub fn p_prime(&self) -> &Field {
        &self.p_prime
    }

    fn check_data(&self, f: &Field, g: &Field) -> Result<()> {
        let grid = self.grid();
        if f.grid() != grid || g.grid() != grid {
            return Err(LabError::GridMismatch("data are not on the solver grid".into()));
        }
        if f.components() != 1 || g.components() != grid.dim() {
            return Err(invalid("data", format!("expected scalar f and {}-vector g", grid.dim())));
        }
        Ok(())
    }

    /// `∇(c·s)` for a scalar representation and coefficient field `c`;
    /// exact when `c` is constant.
    fn weighted_gradient(&self, coef: &Field, s: &Repr) -> Result<Field> {
        if self.model.is_constant_density() {
            let c = coef.values()[0].re;
            let parts = (0..self.grid().dim()).map(|a| s.derivative(a)).collect::<Result<Vec<_>>>()?;
            Ok(Repr::stack(&parts)?.evaluate()?.scaled(Complex64::new(c, 0.0)))
        } else {
            field_gradient(&s.evaluate()?.mul_scalar_field(coef)?)
        }
    }

    /// `∇(P'(η0) f)`.
    fn pressure_gradient(&self, f: &Field) -> Result<Field> {
        field_gradient(&f.mul_scalar_field(&self.p_prime)?)
    }

    /// `U(λ)h`: inverse of `η0λ − αΔ − β∇div` with the wall condition.
    /// For variable `η0` this is `Σ (−S(ρ*λ) η̃λ)^ℓ S(ρ*λ) h`.
    fn velocity_solve(&self, prep: &PreparedLame<'_>, lambda: Complex64, h: &Field) -> Result<(Repr, usize)> {
        let first = prep.solve(h)?;
        let Some(eta) = &self.model.eta_tilde else {
            return Ok((first, 1));
        };
        let weight = eta.scaled(-lambda);
        let mut base = 0.0;
        let mut sum = first.clone();
        let mut term = first;
        let mut prev = f64::INFINITY;
        for terms in 1..=self.max_terms {
            let tv = term.evaluate()?;
            let tn = l2_norm(&tv);
            if terms == 1 {
                base = tn;
            }
            if tn <= self.tol * base {
                return Ok((sum, terms));
            }
            if tn >= prev {
                return Err(LabError::ContractionFailure { kappa: tn / prev, terms });
            }
            prev = tn;
            term = prep.solve(&tv.mul_scalar_field(&weight)?)?;
            sum = sum.axpy(ONE, &term)?;
        }
        Err(LabError::ContractionFailure { kappa: 1.0, terms: self.max_terms })
    }

    /// `h = g − λ⁻¹∇(P'(η0) f)`.
    pub fn reduce_to_lame(&self, lambda: Complex64, f: &Field, g: &Field) -> Result<Field> {
        self.check_data(f, g)?;
        let mut h = g.clone();
        h.axpy(-1.0 / lambda, &self.pressure_gradient(f)?)?;
        Ok(h)
    }

    /// `K k = λ⁻¹∇(P'(η0) η0 div U(λ)k)`.
    pub fn pressure_coupling(&self, lambda: Complex64, k: &Field) -> Result<Field> {
        let prep = self.lame.prepare(self.model.rho_star * lambda)?;
        self.coupling_in(&prep, lambda, k)
    }

    fn coupling_in(&self, prep: &PreparedLame<'_>, lambda: Complex64, k: &Field) -> Result<Field> {
        let (u, _) = self.velocity_solve(prep, lambda, k)?;
        Ok(self.weighted_gradient(&self.p_eta, &u.divergence()?)?.scaled(1.0 / lambda))
    }

    /// `u = U(I − K)⁻¹h`. With constant density on a periodic box `K` is a
    /// Fourier multiplier and the series runs on coefficients.
    fn invert_coupling(&self, prep: &PreparedLame<'_>, lambda: Complex64, h: &Field) -> Result<(Repr, NeumannReport)> {
        let whole = match &self.lame {
            LameSolver::Whole(w) if self.model.is_constant_density() => w,
            _ => {
                let op = |k: &Field| self.coupling_in(prep, lambda, k);
                let nk = neumann_invert(&op, h, self.tol, self.max_terms)?;
                return Ok((self.velocity_solve(prep, lambda, &nk.value)?.0, nk));
            }
        };
        let d = self.grid().dim();
        let mu = self.model.rho_star * lambda;
        let (alpha, beta) = (whole.alpha(), whole.beta());
        let c = self.p_eta.values()[0].re / lambda;
        let op = |k: &Field| {
            let mut tmp = [Complex64::new(0.0, 0.0); 3];
            map_coefficients(k, d, &mut |xi, v, out| {
                lame_symbol(mu, alpha, beta, xi, v, &mut tmp[..d]);
                let div: Complex64 = (0..d).map(|a| I * xi[a] * tmp[a]).sum();
                for a in 0..d {
                    out[a] = I * xi[a] * div * c;
                }
            })
        };
        let nk = neumann_invert(&op, &forward(h)?, self.tol, self.max_terms)?;
        let u = Repr::Periodic(whole.solve_coefficients(mu, &nk.value)?);
        Ok((u, nk))
    }

    /// Stack `(ρ, ∇ρ, u, ∇u, ∇²u)` of the solution with data `(f, g)`;
    /// derivative blocks are `a`-major as in [`Repr::jacobian`].
    pub fn state_at(&self, lambda: Complex64, f: &Field, g: &Field) -> Result<Field> {
        let sol = self.solve_at(lambda, f, g)?;
        self.state_of(&sol, f)
    }

    pub fn state_of(&self, sol: &StokesSolution, f: &Field) -> Result<Field> {
        let d = self.grid().dim();
        let div = sol.u_repr.divergence()?;
        let grad_div = if self.model.is_constant_density() {
            let c = self.eta0.values()[0].re;
            let parts = (0..d).map(|a| div.derivative(a)).collect::<Result<Vec<_>>>()?;
            Repr::stack(&parts)?.evaluate()?.scaled(Complex64::new(c, 0.0))
        } else {
            field_gradient(&div.evaluate()?.mul_scalar_field(&self.eta0)?)?
        };
        let grad_rho = field_gradient(f)?.sub(&grad_div)?.scaled(1.0 / sol.lambda);
        let jac = sol.u_repr.jacobian()?;
        let hess = jac.jacobian()?.evaluate()?;
        let jac = jac.evaluate()?;
        Field::stack(&[&sol.rho, &grad_rho, &sol.u, &jac, &hess])
    }

    /// Solves the Stokes resolvent problem at a sector point.
    pub fn solve(&self, lambda: &SectorPoint, f: &Field, g: &Field) -> Result<StokesSolution> {
        self.solve_at(lambda.lambda(), f, g)
    }

    /// As [`solve`](Self::solve) without the sector check, for contour nodes.
    pub fn solve_at(&self, lambda: Complex64, f: &Field, g: &Field) -> Result<StokesSolution> {
        if lambda.norm() == 0.0 {
            return Err(invalid("lambda", "must be nonzero"));
        }
        let h = self.reduce_to_lame(lambda, f, g)?;
        let prep = self.lame.prepare(self.model.rho_star * lambda)?;
        let (u_repr, nk) = self.invert_coupling(&prep, lambda, &h)?;
        let u = u_repr.evaluate()?;
        let div = u_repr.divergence()?;
        let eta_div = div.evaluate()?.mul_scalar_field(&self.eta0)?;
        let rho = f.sub(&eta_div)?.scaled(1.0 / lambda);

        let data = l2_norm(f) + l2_norm(g);
        let scale = if data > 0.0 { data } else { 1.0 };
        let mass = rho.scaled(lambda).add(&eta_div)?.sub(f)?;

        // ∇(P'ρ) = λ⁻¹(∇(P'f) − ∇(P'η0 div u)) through the same operators used in the solve
        let mut grad_p = self.pressure_gradient(f)?;
        grad_p.axpy(-ONE, &self.weighted_gradient(&self.p_eta, &div)?)?;
        let grad_p = grad_p.scaled(1.0 / lambda);
        let mut lhs = u_repr
            .lame_operator(self.model.rho_star * lambda, self.lame.alpha(), self.lame.beta())?
            .evaluate()?;
        if let Some(eta) = &self.model.eta_tilde {
            lhs.axpy(lambda, &u.mul_scalar_field(eta)?)?;
        }
        let mom = lhs.add(&grad_p)?.sub(g)?;

        // the wall node carries the reflection kink, so half-space residuals are interior
        let (norm, trace_residual): (fn(&Field) -> f64, f64) = match self.grid().kind() {
            GridKind::PeriodicBox => (l2_norm, 0.0),
            GridKind::HalfSpace => (interior_l2, wall_max(&u) / scale),
        };
        Ok(StokesSolution {
            lambda,
            rho,
            u,
            u_repr,
            mass_residual: norm(&mass) / scale,
            momentum_residual: norm(&mom) / scale,
            trace_residual,
            neumann_terms: nk.terms,
            kappa: nk.kappa,
        })
    }

    /// `B_v(λ)g = U(λ)g`.
    pub fn b_v(&self, lambda: Complex64, g: &Field) -> Result<Repr> {
        let prep = self.lame.prepare(self.model.rho_star * lambda)?;
        Ok(self.velocity_solve(&prep, lambda, g)?.0)
    }

    /// `B_v`, `C_v` and `C_m` through a path independent of [`solve_at`](Self::solve_at):
    /// `C_v = U(λ)(Σ_{ℓ≥1} K^ℓ h − λ⁻¹∇(P'f))`.
    pub fn split(&self, lambda: Complex64, f: &Field, g: &Field) -> Result<OperatorSplit> {
        let h = self.reduce_to_lame(lambda, f, g)?;
        let prep = self.lame.prepare(self.model.rho_star * lambda)?;
        let op = |k: &Field| self.coupling_in(&prep, lambda, k);
        let kh = op(&h)?;
        let tail = neumann_invert(&op, &kh, self.tol, self.max_terms)?.value;
        let mut shift = tail;
        shift.axpy(-1.0 / lambda, &self.pressure_gradient(f)?)?;
        let b_v = self.velocity_solve(&prep, lambda, g)?.0;
        let c_v = self.velocity_solve(&prep, lambda, &shift)?.0;
        let u = b_v.axpy(ONE, &c_v)?;
        let eta_div = u.divergence()?.evaluate()?.mul_scalar_field(&self.eta0)?;
        let c_m = f.sub(&eta_div)?.scaled(1.0 / lambda);
        Ok(OperatorSplit { c_m, b_v, c_v })
    }

    /// `max ‖K h‖/‖h‖` over probes and arguments at one modulus.
    pub fn contraction_factor(&self, modulus: f64, args: &[f64], probes: &[Field]) -> Result<f64> {
        let mut kappa: f64 = 0.0;
        for &arg in args {
            let lambda = Complex64::from_polar(modulus, arg);
            let prep = self.lame.prepare(self.model.rho_star * lambda)?;
            for p in probes {
                let pn = l2_norm(p);
                if pn > 0.0 {
                    kappa = kappa.max(l2_norm(&self.coupling_in(&prep, lambda, p)?) / pn);
                }
            }
        }
        Ok(kappa)
    }

    /// Smallest `start·2^j` at which the contraction factor drops below 1/2.
    /// Moduli where the solver itself refuses (short normal box) count as
    /// non-contracting.
    pub fn estimate_lambda3(&self, probes: &[Field], args: &[f64], start: f64, max_doublings: usize) -> Result<Lambda3Report> {
        if probes.is_empty() || args.is_empty() || !(start > 0.0) {
            return Err(invalid("probes", "need probes, arguments and a positive start"));
        }
        let mut samples = Vec::new();
        let mut last_err = None;
        for j in 0..=max_doublings {
            let modulus = start * 2f64.powi(j as i32);
            match self.contraction_factor(modulus, args, probes) {
                Ok(kappa) => {
                    samples.push(KappaSample { modulus, kappa });
                    if kappa < 0.5 {
                        return Ok(Lambda3Report { lambda3: modulus, samples });
                    }
                }
                Err(e @ LabError::InvalidParameter { name: "x_max", .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap_or(LabError::ContractionFailure {
            kappa: samples.last().map_or(f64::INFINITY, |s| s.kappa),
            terms: max_doublings,
        }))
    }
}
