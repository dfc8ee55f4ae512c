//! Half-space Lamé resolvent with homogeneous Dirichlet condition.

use num_complex::Complex64;
use std::sync::Arc;

use super::rep::{HalfSpaceRep, LayerBasis};
use super::roots::{roots_at, CharacteristicRoots};
use crate::error::{invalid, LabError, Result};
use crate::model::ModelParams;
use crate::spectral::extension::{extend, vector_parities};
use crate::spectral::norms::l2_norm;
use crate::spectral::transform::forward;
use crate::spectral::{Field, GridKind, SectorPoint, SpectralGrid};
use crate::wholespace::WholeSpaceResolvent;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Required decay `e^{−Re B·X_max}` of the boundary layer at the far end.
pub const DECAY_PADDING: f64 = 1e-12;

/// Number of components of the `D_λ` stack, `(N−1)(1+N+N²)`.
pub fn stack_components(n: usize) -> usize {
    (n - 1) * (1 + n + n * n)
}

#[derive(Debug, Clone)]
pub struct HalfSpaceSolution {
    pub u: Field,
    pub rep: HalfSpaceRep,
    /// Relative L2 residual of the PDE off the wall.
    pub residual: f64,
    /// `max |u(x', 0)| / ‖g‖_2`.
    pub trace: f64,
}

/// Layer amplitudes `(p, q)` of a corrector, index `c·T + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectorLayer {
    pub p: Vec<Complex64>,
    pub q: Vec<Complex64>,
}

impl CorrectorLayer {
    /// Largest amplitude difference relative to the largest amplitude of `other`.
    pub fn relative_difference(&self, other: &CorrectorLayer) -> f64 {
        let diff = self
            .p
            .iter()
            .zip(&other.p)
            .chain(self.q.iter().zip(&other.q))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let scale = other.p.iter().chain(&other.q).map(|v| v.norm()).fold(0.0, f64::max);
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }
}

#[derive(Debug, Clone)]
pub struct HalfSpaceResolvent {
    alpha: f64,
    beta: f64,
    grid: SpectralGrid,
    box_solver: WholeSpaceResolvent,
}

impl HalfSpaceResolvent {
    pub fn new(model: &ModelParams, grid: &SpectralGrid) -> Result<Self> {
        model.validate()?;
        grid.require_kind(GridKind::HalfSpace, "half-space resolvent")?;
        let ext = grid.extended_box()?;
        Ok(Self {
            alpha: model.alpha,
            beta: model.beta,
            grid: grid.clone(),
            box_solver: WholeSpaceResolvent::new(model, &ext)?,
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

    /// Characteristic roots for every tangential mode.
    pub fn layer_basis(&self, lambda: Complex64) -> Result<Arc<LayerBasis>> {
        let modes = super::kernel::tangential_modes(&self.grid);
        let roots = modes
            .iter()
            .map(|xi| roots_at(lambda, xi.iter().map(|k| k * k).sum(), self.alpha, self.beta))
            .collect::<Result<Vec<_>>>()?;
        let x_max = self.grid.x_max().expect("half-space grid");
        let worst = roots.iter().map(|r| r.a.re.min(r.b.re)).fold(f64::INFINITY, f64::min);
        if (-worst * x_max).exp() > DECAY_PADDING {
            return Err(invalid(
                "x_max",
                format!(
                    "e^(-min(Re A, Re B) X_max) = {:.2e} exceeds {DECAY_PADDING:e} at lambda = {lambda}; need X_max >= {:.1}",
                    (-worst * x_max).exp(),
                    -DECAY_PADDING.ln() / worst
                ),
            ));
        }
        Ok(Arc::new(LayerBasis::new(&self.grid, lambda, roots)?))
    }

    fn check_data(&self, g: &Field) -> Result<()> {
        if g.grid() != &self.grid {
            return Err(LabError::GridMismatch("datum is not on the solver grid".into()));
        }
        if g.components() != self.grid.dim() {
            return Err(invalid("g", format!("expected {} components", self.grid.dim())));
        }
        Ok(())
    }

    /// Whole-space solve of the reflected datum, as a representation
    /// without boundary layer.
    pub fn extension_solve(&self, basis: &Arc<LayerBasis>, g: &Field) -> Result<HalfSpaceRep> {
        self.check_data(g)?;
        let ge = extend(g, &vector_parities(self.grid.dim()))?;
        let spec = forward(&ge)?;
        let u_spec = self.box_solver.solve_coefficients(basis.lambda, &spec)?;
        let tc = basis.tangential_count();
        let zeros = vec![Complex64::new(0.0, 0.0); tc * g.components()];
        HalfSpaceRep::new(basis.clone(), u_spec, zeros.clone(), zeros)
    }

    /// Tangential coefficients of the wall trace of the box part, index `c·T + t`.
    pub fn box_trace(&self, rep: &HalfSpaceRep) -> Vec<Complex64> {
        let spec = rep.box_spectrum();
        let n2 = 2 * *self.grid.points().last().expect("non-empty");
        let tc = rep.basis().tangential_count();
        let mut out = vec![Complex64::new(0.0, 0.0); tc * spec.components()];
        for c in 0..spec.components() {
            let vals = spec.component(c);
            for t in 0..tc {
                let line = &vals[t * n2..(t + 1) * n2];
                let s: Complex64 = line
                    .iter()
                    .enumerate()
                    .map(|(k, v)| if k % 2 == 0 { *v } else { -*v })
                    .sum();
                out[c * tc + t] = s / n2 as f64;
            }
        }
        out
    }

    /// Closed-form solution `w` of the homogeneous Lamé system with
    /// Dirichlet data `h' = trace` (tangential components only):
    /// `ŵ_j = ĥ_j e^{−Bx} − M(x)βiξ_j(iξ'·ĥ')/L`, `ŵ_N = M(x)βA(iξ'·ĥ')/L`.
    pub fn closed_form_corrector(&self, basis: &LayerBasis, trace: &[Complex64]) -> CorrectorLayer {
        let d = self.grid.dim();
        let tc = basis.tangential_count();
        let mut p = vec![Complex64::new(0.0, 0.0); d * tc];
        let mut q = vec![Complex64::new(0.0, 0.0); d * tc];
        for t in 0..tc {
            let xi = &basis.modes[t];
            let r = &basis.roots[t];
            let s: Complex64 = (0..d - 1).map(|k| I * xi[k] * trace[k * tc + t]).sum();
            for j in 0..d - 1 {
                p[j * tc + t] = trace[j * tc + t];
                q[j * tc + t] = -self.beta * I * xi[j] * s / r.l;
            }
            q[(d - 1) * tc + t] = self.beta * r.a * s / r.l;
        }
        CorrectorLayer { p, q }
    }

    /// `u = S(λ)g_e|_H − T_h(λ)D_λ(S(λ)g_e)'` as an exact representation.
    pub fn solve_rep(&self, lambda: Complex64, g: &Field) -> Result<HalfSpaceRep> {
        let basis = self.layer_basis(lambda)?;
        self.solve_rep_in(&basis, g)
    }

    pub fn solve_rep_in(&self, basis: &Arc<LayerBasis>, g: &Field) -> Result<HalfSpaceRep> {
        let u0 = self.extension_solve(basis, g)?;
        let trace = self.box_trace(&u0);
        let w = self.closed_form_corrector(basis, &trace);
        let neg = |v: Vec<Complex64>| v.into_iter().map(|x| -x).collect::<Vec<_>>();
        HalfSpaceRep::new(basis.clone(), u0.box_spectrum().clone(), neg(w.p), neg(w.q))
    }

    pub fn solve(&self, lambda: &SectorPoint, g: &Field) -> Result<HalfSpaceSolution> {
        let rep = self.solve_rep(lambda.lambda(), g)?;
        let u = rep.evaluate()?;
        let residual = self.interior_residual(&rep, g)?;
        let gn = l2_norm(g);
        let trace = wall_max(&u) / if gn > 0.0 { gn } else { 1.0 };
        Ok(HalfSpaceSolution { u, rep, residual, trace })
    }

    /// `∂_λ S_h(λ)g = −S_h(λ)S_h(λ)g`.
    pub fn solve_derivative_rep(&self, lambda: Complex64, g: &Field) -> Result<HalfSpaceRep> {
        let basis = self.layer_basis(lambda)?;
        let once = self.solve_rep_in(&basis, g)?.evaluate()?;
        Ok(self.solve_rep_in(&basis, &once)?.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// Relative L2 residual of `λu − αΔu − β∇div u = g` on nodes with `x_N > 0`.
    pub fn interior_residual(&self, rep: &HalfSpaceRep, g: &Field) -> Result<f64> {
        let lhs = rep.lame_operator(rep.basis().lambda, self.alpha, self.beta)?.evaluate()?;
        let r = lhs.sub(g)?;
        let (num, den) = (interior_l2(&r), interior_l2(g));
        Ok(if den > 0.0 { num / den } else { num })
    }

    /// The `D_λ` stack `(λh_k, λ^{1/2}∂_a h_k, ∂_a∂_b h_k)` of the tangential
    /// components `h` of a representation, with `(N−1)(1+N+N²)` components.
    pub fn dlambda_stack(&self, rep: &HalfSpaceRep) -> Result<Field> {
        let d = self.grid.dim();
        let lambda = rep.basis().lambda;
        let sq = lambda.sqrt();
        let tang: Vec<HalfSpaceRep> = (0..d - 1).map(|k| rep.component(k)).collect();
        let mut parts = Vec::with_capacity(stack_components(d));
        for h in &tang {
            parts.push(h.scaled(lambda));
        }
        for a in 0..d {
            for h in &tang {
                parts.push(h.derivative(a)?.scaled(sq));
            }
        }
        for a in 0..d {
            for b in 0..d {
                for h in &tang {
                    parts.push(h.derivative(a)?.derivative(b)?);
                }
            }
        }
        HalfSpaceRep::stack(&parts)?.evaluate()
    }

    /// Corrector `T_h(λ)H` computed from the `D_λ` stack with the Volevich
    /// integrals, using trapezoid quadrature in `y_N`.
    pub fn volevich_corrector(&self, basis: &LayerBasis, stack: &Field) -> Result<CorrectorLayer> {
        let d = self.grid.dim();
        if stack.grid() != &self.grid || stack.components() != stack_components(d) {
            return Err(invalid("stack", format!("expected {} components", stack_components(d))));
        }
        let m = d - 1;
        let n = basis.normal_points();
        let tc = basis.tangential_count();
        let lambda = basis.lambda;
        let sq = lambda.sqrt();
        let weights: Vec<f64> = (0..n).map(|j| self.grid.normal_weight(j)).collect();
        let mut spec = stack.clone();
        for c in 0..spec.components() {
            super::kernel::tangential_fft(spec.component_mut(c), &self.grid, crate::spectral::transform::Direction::Forward);
        }
        let h1 = |k: usize| k;
        let h2 = |a: usize, k: usize| m + a * m + k;
        let h3 = |a: usize, b: usize, k: usize| m + d * m + (a * d + b) * m + k;
        let mut p = vec![Complex64::new(0.0, 0.0); d * tc];
        let mut q = vec![Complex64::new(0.0, 0.0); d * tc];
        for t in 0..tc {
            let xi = &basis.modes[t];
            let r: &CharacteristicRoots = &basis.roots[t];
            let b2 = r.b * r.b;
            let mut s_b = Complex64::new(0.0, 0.0);
            let mut s_m = Complex64::new(0.0, 0.0);
            for k in 0..m {
                let mut e = Complex64::new(0.0, 0.0);
                let mut cb = Complex64::new(0.0, 0.0);
                let mut cm = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    let at = |c: usize| spec.component(c)[t * n + j];
                    let mut hk = at(h1(k)) / (self.alpha * b2);
                    let mut dk = sq * at(h2(d - 1, k)) / (self.alpha * b2);
                    for l in 0..m {
                        hk -= at(h3(l, l, k)) / b2;
                        dk -= I * xi[l] * at(h3(l, d - 1, k)) / b2;
                    }
                    let kv = &basis.values[t * n + j];
                    let w = weights[j];
                    e += w * kv.eb * (r.b * hk - dk);
                    cb += w * (r.a * kv.m * hk + kv.eb * hk - kv.m * dk);
                    cm += w * kv.ea * (r.a * hk - dk);
                }
                p[k * tc + t] = e;
                s_b += I * xi[k] * cb;
                s_m += I * xi[k] * cm;
            }
            for k in 0..m {
                p[k * tc + t] -= self.beta * I * xi[k] * s_b / r.l;
                q[k * tc + t] = -self.beta * I * xi[k] * s_m / r.l;
            }
            p[m * tc + t] = self.beta * r.a * s_b / r.l;
            q[m * tc + t] = self.beta * r.a * s_m / r.l;
        }
        Ok(CorrectorLayer { p, q })
    }
}

/// `max |f(x', 0)|` over all components.
pub fn wall_max(f: &Field) -> f64 {
    let n = *f.grid().points().last().expect("non-empty");
    let mut m: f64 = 0.0;
    for c in 0..f.components() {
        for (i, v) in f.component(c).iter().enumerate() {
            if i % n == 0 {
                m = m.max(v.norm());
            }
        }
    }
    m
}

/// L2 norm over nodes with `x_N > 0`.
pub fn interior_l2(f: &Field) -> f64 {
    let n = *f.grid().points().last().expect("non-empty");
    let mut acc = 0.0;
    for c in 0..f.components() {
        for (i, v) in f.component(c).iter().enumerate() {
            if i % n != 0 {
                acc += f.grid().point_weight(i) * v.norm_sqr();
            }
        }
    }
    acc.sqrt()
}
