//! Laplace inversion along sector contours, dyadic-block L1-in-time sums and
//! the Duhamel solve of the linearized Stokes system.
//!
//! `N(t)g = (2πi)⁻¹ ∫ e^{λt} R(λ)g dλ` over `γ + r e^{±i(π−ε)}`. Quadrature is
//! composite Gauss–Legendre in `r` with panel widths that grow geometrically
//! near the vertex and track `1/t` further out.

use std::f64::consts::PI;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::besov::{BesovParams, LPFamily};
use crate::error::{invalid, LabError, Result};
use crate::halfspace::solver::interior_l2;
use crate::operators::field_gradient;
use crate::spectral::norms::l2_norm;
use crate::spectral::{Field, GridKind};
use crate::stokes::StokesResolvent;

/// Gauss–Legendre nodes per panel.
const ORDER: usize = 8;
/// `e^{−TAIL} < 1e-14`.
const TAIL: f64 = 32.2;
/// Largest `t_max/t_min` sharing one node set.
const GROUP_RATIO: f64 = 2.0;
const CHUNK: usize = 32;
const MAX_PANELS: usize = 200_000;

fn gauss_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(ORDER).expect("order is at least 2"))
        .as_node_weight_pairs()
}

/// Gauss–Legendre nodes and weights on `[a, b]` split into `panels` pieces.
fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> Result<Vec<(f64, f64)>> {
    let rule = GaussLegendre::new(order).map_err(|e| invalid("order", e.to_string()))?;
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for &(x, w) in rule.as_node_weight_pairs() {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    /// Vertex shift; must lie right of every singularity of the family.
    pub gamma: f64,
    /// Sector angle: the rays leave the vertex at `±(π − ε)`.
    pub epsilon: f64,
    /// Radial truncation; `None` picks `r_max` per time so the tail is below 1e-14.
    pub r_max: Option<f64>,
    /// Node density near the vertex.
    pub nodes_per_decade: usize,
}

struct Node {
    lambda: Complex64,
    weight: Complex64,
    last: bool,
}

impl ContourSpec {
    pub fn new(gamma: f64, epsilon: f64) -> Result<Self> {
        let c = Self { gamma, epsilon, r_max: None, nodes_per_decade: 40 };
        c.validate()?;
        Ok(c)
    }

    pub fn with_r_max(mut self, r_max: f64) -> Result<Self> {
        self.r_max = Some(r_max);
        self.validate()?;
        Ok(self)
    }

    pub fn with_nodes_per_decade(mut self, n: usize) -> Result<Self> {
        self.nodes_per_decade = n;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(invalid("gamma", format!("{} must be positive", self.gamma)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < PI / 2.0) {
            return Err(invalid("epsilon", format!("{} not in (0, π/2)", self.epsilon)));
        }
        if let Some(r) = self.r_max {
            if !(r > 0.0 && r.is_finite()) {
                return Err(invalid("r_max", "must be positive"));
            }
        }
        if self.nodes_per_decade < ORDER {
            return Err(invalid("nodes_per_decade", format!("must be at least {ORDER}")));
        }
        Ok(())
    }

    /// Ray angle and decay rate `−Re e^{iθ}·sign(t)`. Negative times use a
    /// right-opening contour, on which `e^{λt}` decays instead.
    fn geometry(&self, causal: bool) -> (f64, f64, f64) {
        if causal {
            (PI - self.epsilon, self.epsilon.cos(), self.epsilon.sin())
        } else {
            (PI / 3.0, 0.5, 1.0)
        }
    }

    fn auto_r_max(&self, s_min: f64, causal: bool) -> f64 {
        TAIL / (s_min * self.geometry(causal).1)
    }

    /// Nodes valid for all `|t| ∈ [s_min, s_max]`.
    fn nodes(&self, s_min: f64, s_max: f64, causal: bool) -> Result<Vec<Node>> {
        let (theta, decay, spread) = self.geometry(causal);
        let r_max = self.r_max.unwrap_or_else(|| self.auto_r_max(s_min, causal));
        let geo = (10f64.powf(ORDER as f64 / self.nodes_per_decade as f64) - 1.0).min(0.5 * spread);
        let up = Complex64::from_polar(1.0, theta);
        let down = up.conj();
        let scale = Complex64::new(0.0, -1.0 / (2.0 * PI));
        let mut nodes = Vec::new();
        let mut r = 0.0;
        let mut panels = 0;
        while r < r_max {
            let w = (geo * (r + self.gamma)).min(4.0 * (1.0 / s_max).max(r * decay / TAIL));
            let mut b = r + w;
            if b >= r_max || r_max - b < 1e-3 * w {
                b = r_max;
            }
            let last = b == r_max;
            for &(x, wx) in gauss_rule() {
                let rr = r + 0.5 * (b - r) * (x + 1.0);
                let wr = 0.5 * (b - r) * wx;
                nodes.push(Node { lambda: self.gamma + rr * up, weight: scale * wr * up, last });
                nodes.push(Node { lambda: self.gamma + rr * down, weight: -scale * wr * down, last });
            }
            r = b;
            panels += 1;
            if panels > MAX_PANELS {
                return Err(invalid("r_max", format!("{r_max:.3e} needs more than {MAX_PANELS} panels")));
            }
        }
        Ok(nodes)
    }
}

/// `λ ↦ R(λ)g` for some fixed `g`.
pub type Family<'a> = dyn Fn(Complex64) -> Result<Field> + Sync + 'a;

struct Partial {
    sums: Vec<Option<Field>>,
    mass: Vec<f64>,
    tail: Vec<f64>,
}

impl Partial {
    fn new(outputs: usize) -> Self {
        Self { sums: vec![None; outputs], mass: vec![0.0; outputs], tail: vec![0.0; outputs] }
    }

    fn merge(&mut self, o: Partial) -> Result<()> {
        for (i, s) in o.sums.into_iter().enumerate() {
            if let Some(s) = s {
                match &mut self.sums[i] {
                    Some(acc) => acc.axpy(Complex64::new(1.0, 0.0), &s)?,
                    slot => *slot = Some(s),
                }
            }
            self.mass[i] += o.mass[i];
            self.tail[i] += o.tail[i];
        }
        Ok(())
    }
}

/// `Σ w_k term(λ_k)` with a fixed chunking, so the result does not depend on
/// the number of worker threads.
fn contour_sum(
    nodes: &[Node],
    outputs: usize,
    term: &(dyn Fn(Complex64) -> Result<Vec<Field>> + Sync),
) -> Result<Partial> {
    let parts = nodes
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut p = Partial::new(outputs);
            for node in chunk {
                for (i, v) in term(node.lambda)?.into_iter().enumerate() {
                    let m = node.weight.norm() * l2_norm(&v);
                    p.mass[i] += m;
                    if node.last {
                        p.tail[i] += m;
                    }
                    match &mut p.sums[i] {
                        Some(acc) => acc.axpy(node.weight, &v)?,
                        slot => *slot = Some(v.scaled(node.weight)),
                    }
                }
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = Partial::new(outputs);
    for p in parts {
        total.merge(p)?;
    }
    Ok(total)
}

fn check_tail(p: &Partial, i: usize, t: f64, advice_r: f64) -> Result<()> {
    if p.tail[i] > 1e-10 * p.mass[i] {
        return Err(LabError::ContourTruncation {
            detail: format!("last panel carries {:.3e} of {:.3e} at t = {t}", p.tail[i], p.mass[i]),
            advice: format!("r_max ≥ {advice_r:.3e}"),
        });
    }
    Ok(())
}

/// Splits times into same-sign groups with `max/min ≤ GROUP_RATIO`.
fn group_times(times: &[f64]) -> Result<Vec<Vec<usize>>> {
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t != 0.0)) {
        return Err(invalid("t", format!("{t} must be finite and nonzero")));
    }
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| {
        let (ta, tb) = (times[a], times[b]);
        (ta > 0.0).cmp(&(tb > 0.0)).then(ta.abs().total_cmp(&tb.abs()))
    });
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in order {
        match groups.last_mut() {
            Some(g) if (times[g[0]] > 0.0) == (times[i] > 0.0) && times[i].abs() <= GROUP_RATIO * times[g[0]].abs() => {
                g.push(i)
            }
            _ => groups.push(vec![i]),
        }
    }
    Ok(groups)
}

/// `N(t)g` at several times. Each contour node is evaluated once per group
/// of nearby times.
pub fn laplace_invert_many(family: &Family<'_>, times: &[f64], contour: &ContourSpec) -> Result<Vec<Field>> {
    contour.validate()?;
    let mut out: Vec<Option<Field>> = vec![None; times.len()];
    for group in group_times(times)? {
        let causal = times[group[0]] > 0.0;
        let ts: Vec<f64> = group.iter().map(|&i| times[i]).collect();
        let s_min = ts[0].abs();
        let s_max = ts[ts.len() - 1].abs();
        let nodes = contour.nodes(s_min, s_max, causal)?;
        let term = |lambda: Complex64| {
            let r = family(lambda)?;
            Ok(ts.iter().map(|&t| r.scaled((lambda * t).exp())).collect())
        };
        let p = contour_sum(&nodes, ts.len(), &term)?;
        for k in 0..group.len() {
            check_tail(&p, k, ts[k], contour.auto_r_max(ts[k].abs(), causal))?;
        }
        for (k, s) in p.sums.into_iter().enumerate() {
            out[group[k]] = s;
        }
    }
    out.into_iter()
        .map(|f| f.ok_or_else(|| invalid("times", "empty contour")))
        .collect()
}

pub fn laplace_invert(family: &Family<'_>, t: f64, contour: &ContourSpec) -> Result<Field> {
    Ok(laplace_invert_many(family, &[t], contour)?.remove(0))
}

/// Block suprema `a_j = sup_{t ∈ (2^j, 2^{j+1})} e^{−γt}‖N(t)g‖`.
#[derive(Debug, Clone, Serialize)]
pub struct DyadicL1Report {
    pub j_min: i32,
    pub j_max: i32,
    pub block_suprema: Vec<f64>,
    /// `Σ_j 2^j a_j`, an upper bound for `∫ e^{−γt}‖N(t)g‖ dt` over the range.
    pub weighted_sum: f64,
    pub gamma: f64,
    pub samples_per_block: usize,
    /// `log2(a_{j+1}/a_j)`.
    pub block_slopes: Vec<f64>,
}

impl DyadicL1Report {
    pub fn a(&self, j: i32) -> Option<f64> {
        if j < self.j_min || j > self.j_max {
            return None;
        }
        Some(self.block_suprema[(j - self.j_min) as usize])
    }
}

/// Samples each dyadic block at `samples_per_block` interior times and sums
/// `2^j a_j`. `measure` is the spatial norm, e.g. a Besov norm of `∇̄²N(t)g`.
pub fn l1_time_integral(
    family: &Family<'_>,
    measure: &(dyn Fn(&Field) -> Result<f64> + Sync),
    j_range: (i32, i32),
    contour: &ContourSpec,
    samples_per_block: usize,
) -> Result<DyadicL1Report> {
    let (j_min, j_max) = j_range;
    if j_min > j_max || samples_per_block == 0 {
        return Err(invalid("j_range", "need j_min ≤ j_max and at least one sample per block"));
    }
    let m = samples_per_block as f64;
    let mut times = Vec::new();
    for j in j_min..=j_max {
        for k in 0..samples_per_block {
            times.push(2f64.powf(j as f64 + (k as f64 + 0.5) / m));
        }
    }
    let values = laplace_invert_many(family, &times, contour)?;
    let norms = values.par_iter().map(measure).collect::<Result<Vec<_>>>()?;
    let mut block_suprema = Vec::new();
    let mut weighted_sum = 0.0;
    for (b, j) in (j_min..=j_max).enumerate() {
        let mut a: f64 = 0.0;
        for k in 0..samples_per_block {
            let i = b * samples_per_block + k;
            let v = (-contour.gamma * times[i]).exp() * norms[i];
            if !v.is_finite() {
                return Err(LabError::DivergentBlockSum { block: j });
            }
            a = a.max(v);
        }
        weighted_sum += 2f64.powi(j) * a;
        block_suprema.push(a);
    }
    if j_max - j_min >= 2 && weighted_sum > 0.0 {
        let last = 2f64.powi(j_max) * block_suprema[block_suprema.len() - 1];
        if last > 0.5 * weighted_sum {
            return Err(LabError::DivergentBlockSum { block: j_max });
        }
    }
    let block_slopes = block_suprema.windows(2).map(|w| (w[1] / w[0]).log2()).collect();
    Ok(DyadicL1Report {
        j_min,
        j_max,
        block_suprema,
        weighted_sum,
        gamma: contour.gamma,
        samples_per_block,
        block_slopes,
    })
}

/// Least-squares slope of `log2 max_p a_j(g_p)/‖g_p‖` against `j` over `j_fit`.
pub fn envelope_slope(probes: &[(&DyadicL1Report, f64)], j_fit: (i32, i32)) -> Result<f64> {
    let mut pts = Vec::new();
    for j in j_fit.0..=j_fit.1 {
        let mut e: f64 = 0.0;
        for (r, n) in probes {
            let a = r.a(j).ok_or_else(|| invalid("j_fit", format!("block {j} outside a report's range")))?;
            e = e.max(a / n);
        }
        if e > 0.0 {
            pts.push((j as f64, e.log2()));
        }
    }
    if pts.len() < 3 {
        return Err(LabError::InsufficientSamples(format!("{} positive envelope blocks", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// `(F, G)` at time `t`.
pub type Forcing<'a> = dyn Fn(f64) -> Result<(Field, Field)> + Sync + 'a;

/// Stokes state `(ρ, ∇ρ, u, ∇u, ∇²u)` at one time; derivative blocks are
/// `a`-major.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub state: Field,
}

impl Snapshot {
    fn dim(&self) -> usize {
        self.state.grid().dim()
    }

    fn block(&self, start: usize, len: usize) -> Field {
        let parts: Vec<Field> = (start..start + len).map(|c| self.state.extract(c)).collect();
        Field::stack(&parts.iter().collect::<Vec<_>>()).expect("components share a grid")
    }

    pub fn rho(&self) -> Field {
        self.block(0, 1)
    }

    pub fn grad_rho(&self) -> Field {
        self.block(1, self.dim())
    }

    pub fn u(&self) -> Field {
        self.block(1 + self.dim(), self.dim())
    }

    pub fn jacobian(&self) -> Field {
        let d = self.dim();
        self.block(1 + 2 * d, d * d)
    }

    pub fn hessian(&self) -> Field {
        let d = self.dim();
        self.block(1 + 2 * d + d * d, d * d * d)
    }
}

/// Composite Gauss–Legendre rule for the Duhamel convolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuhamelSpec {
    pub panels: usize,
    pub order: usize,
}

impl Default for DuhamelSpec {
    fn default() -> Self {
        Self { panels: 4, order: 8 }
    }
}

/// `T(t)(f, g) = L⁻¹[A(λ)(f, η0 g)](t)`, the semigroup of the Stokes system.
pub struct StokesSemigroup<'a> {
    solver: &'a StokesResolvent,
    contour: ContourSpec,
}

impl<'a> StokesSemigroup<'a> {
    pub fn new(solver: &'a StokesResolvent, contour: ContourSpec) -> Result<Self> {
        contour.validate()?;
        Ok(Self { solver, contour })
    }

    pub fn solver(&self) -> &StokesResolvent {
        self.solver
    }

    pub fn contour(&self) -> &ContourSpec {
        &self.contour
    }

    /// `T(t)(ρ0, u0)` at each time.
    pub fn apply(&self, times: &[f64], rho0: &Field, u0: &Field) -> Result<Vec<Snapshot>> {
        let g = u0.mul_scalar_field(self.solver.eta0())?;
        let family = |lambda: Complex64| self.solver.state_at(lambda, rho0, &g);
        let states = laplace_invert_many(&family, times, &self.contour)?;
        Ok(times.iter().zip(states).map(|(&t, state)| Snapshot { t, state }).collect())
    }

    /// `T(t)(ρ0, u0) + ∫₀ᵗ T(t − τ)(F, G)(τ) dτ`. Per time and contour node the
    /// convolution collapses into one resolvent solve with data
    /// `e^{λt}(ρ0, η0u0) + Σ_k w_k e^{λ(t−τ_k)}(F, η0G)(τ_k)`.
    pub fn duhamel(
        &self,
        rho0: &Field,
        u0: &Field,
        forcing: Option<&Forcing<'_>>,
        times: &[f64],
        spec: DuhamelSpec,
    ) -> Result<Vec<Snapshot>> {
        let Some(forcing) = forcing else {
            return self.apply(times, rho0, u0);
        };
        if spec.panels == 0 || spec.order < 2 {
            return Err(invalid("duhamel", "need at least one panel of order ≥ 2"));
        }
        let eta0 = self.solver.eta0();
        let g0 = u0.mul_scalar_field(eta0)?;
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            if !(t > 0.0 && t.is_finite()) {
                return Err(invalid("t", format!("{t} must be positive")));
            }
            let rule = composite_rule(0.0, t, spec.panels, spec.order)?;
            let samples = rule
                .iter()
                .map(|&(tau, w)| {
                    let (f, g) = forcing(tau)?;
                    Ok((t - tau, w, f, g.mul_scalar_field(eta0)?))
                })
                .collect::<Result<Vec<_>>>()?;
            let s_min = samples.iter().map(|s| s.0).fold(t, f64::min);
            let nodes = self.contour.nodes(s_min, t, true)?;
            let term = |lambda: Complex64| {
                let e = (lambda * t).exp();
                let mut f = rho0.scaled(e);
                let mut g = g0.scaled(e);
                for (s, w, fk, gk) in &samples {
                    let c = *w * (lambda * s).exp();
                    f.axpy(c, fk)?;
                    g.axpy(c, gk)?;
                }
                Ok(vec![self.solver.state_at(lambda, &f, &g)?])
            };
            let p = contour_sum(&nodes, 1, &term)?;
            check_tail(&p, 0, s_min, self.contour.auto_r_max(s_min, true))?;
            let state = p.sums.into_iter().next().flatten().ok_or_else(|| invalid("times", "empty contour"))?;
            out.push(Snapshot { t, state });
        }
        Ok(out)
    }
}

/// Right-hand sides of the evolution equations at one snapshot.
#[derive(Debug, Clone)]
pub struct TimeDerivatives {
    /// `−η0 div u + F`.
    pub rho_t: Field,
    /// `∇` of `rho_t`.
    pub grad_rho_t: Field,
    /// `η0⁻¹(αΔu + β∇div u − ∇(P'ρ)) + G`.
    pub u_t: Field,
}

pub fn time_derivatives(solver: &StokesResolvent, snap: &Snapshot, forcing: Option<(&Field, &Field)>) -> Result<TimeDerivatives> {
    let grid = snap.state.grid();
    let d = grid.dim();
    let n = grid.total_points();
    let (alpha, beta) = (solver.lame().alpha(), solver.lame().beta());
    let eta = solver.eta0().values();
    let pp = solver.p_prime().values();
    let grad_eta = field_gradient(solver.eta0())?;
    let grad_pp = field_gradient(solver.p_prime())?;
    let v = snap.state.values();
    let (rho, grad_rho, jac, hess) = (0, 1, 1 + 2 * d, 1 + 2 * d + d * d);
    let at = |c: usize, p: usize| v[c * n + p];

    let mut rho_t = Field::zeros(grid, 1);
    let mut grad_rho_t = Field::zeros(grid, d);
    let mut u_t = Field::zeros(grid, d);
    {
        let (rt, gt, ut) = (rho_t.values_mut(), grad_rho_t.values_mut(), u_t.values_mut());
        for p in 0..n {
            let div: Complex64 = (0..d).map(|a| at(jac + a * d + a, p)).sum();
            rt[p] = -eta[p] * div;
            for c in 0..d {
                let lap: Complex64 = (0..d).map(|a| at(hess + a * d * d + a * d + c, p)).sum();
                let grad_div: Complex64 = (0..d).map(|a| at(hess + c * d * d + a * d + a, p)).sum();
                let pressure = pp[p] * at(grad_rho + c, p) + at(rho, p) * grad_pp.values()[c * n + p];
                ut[c * n + p] = (alpha * lap + beta * grad_div - pressure) / eta[p];
                gt[c * n + p] = -(eta[p] * grad_div + div * grad_eta.values()[c * n + p]);
            }
        }
    }
    if let Some((f, g)) = forcing {
        let one = Complex64::new(1.0, 0.0);
        rho_t.axpy(one, f)?;
        grad_rho_t.axpy(one, &field_gradient(f)?)?;
        u_t.axpy(one, g)?;
    }
    Ok(TimeDerivatives { rho_t, grad_rho_t, u_t })
}

fn residual_norm(f: &Field) -> f64 {
    match f.grid().kind() {
        GridKind::PeriodicBox => l2_norm(f),
        GridKind::HalfSpace => interior_l2(f),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TimeResidual {
    pub dt: f64,
    /// `max_i ‖D_t x_i − RHS_i‖ / max_i ‖RHS_i‖` over interior times.
    pub max_relative: f64,
    pub per_time: Vec<(f64, f64)>,
}

/// Central differences of `(ρ, u)` against the evolution equations.
pub fn time_derivative_residual(
    trajectory: &[Snapshot],
    forcing: Option<&Forcing<'_>>,
    solver: &StokesResolvent,
) -> Result<TimeResidual> {
    if trajectory.len() < 4 {
        return Err(LabError::InsufficientSamples(format!("{} time points, need at least 4", trajectory.len())));
    }
    let dt = trajectory[1].t - trajectory[0].t;
    if !(dt > 0.0) || trajectory.windows(2).any(|w| ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.max(w[1].t.abs())) {
        return Err(invalid("trajectory", "times must be increasing and uniformly spaced"));
    }
    let mut raw = Vec::new();
    let mut scale: f64 = 0.0;
    for i in 1..trajectory.len() - 1 {
        let snap = &trajectory[i];
        let data = forcing.map(|f| f(snap.t)).transpose()?;
        let rhs = time_derivatives(solver, snap, data.as_ref().map(|(f, g)| (f, g)))?;
        let h = Complex64::new(0.5 / dt, 0.0);
        let d_rho = trajectory[i + 1].rho().sub(&trajectory[i - 1].rho())?.scaled(h);
        let d_u = trajectory[i + 1].u().sub(&trajectory[i - 1].u())?.scaled(h);
        let err = residual_norm(&d_rho.sub(&rhs.rho_t)?) + residual_norm(&d_u.sub(&rhs.u_t)?);
        scale = scale.max(residual_norm(&rhs.rho_t) + residual_norm(&rhs.u_t));
        raw.push((snap.t, err));
    }
    let per_time: Vec<(f64, f64)> = raw
        .into_iter()
        .map(|(t, e)| (t, if scale > 0.0 { e / scale } else { e }))
        .collect();
    let max_relative = per_time.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(TimeResidual { dt, max_relative, per_time })
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxRegularity {
    /// `‖(∂tρ, ρ)‖_{L1 B^{s+1}} + ‖∂tu‖_{L1 B^s} + ‖u‖_{L1 B^{s+2}}` on `(0, T)`.
    pub lhs: f64,
    /// `‖ρ0‖_{B^{s+1}} + ‖u0‖_{B^s}`.
    pub rhs: f64,
    pub quotient: f64,
    pub horizon: f64,
}

/// Maximal-regularity quotient for the homogeneous problem. `B^{s+k}` norms
/// are taken as `B^s` norms of the stacked derivatives up to order `k`; the
/// time integral runs over `(0, 2^{j_max+1})` with Gauss–Legendre on dyadic
/// blocks.
pub fn max_regularity_quotient(
    semigroup: &StokesSemigroup<'_>,
    rho0: &Field,
    u0: &Field,
    besov: &BesovParams,
    lp: &LPFamily,
    j_range: (i32, i32),
    nodes_per_block: usize,
) -> Result<MaxRegularity> {
    let (j_min, j_max) = j_range;
    if j_min > j_max {
        return Err(invalid("j_range", "need j_min ≤ j_max"));
    }
    let norm = |f: &Field| -> Result<f64> { Ok(lp.block_norms(f, besov.q)?.besov(besov.s, besov.r)) };
    let mut rule = composite_rule(0.0, 2f64.powi(j_min), 1, nodes_per_block)?;
    for j in j_min..=j_max {
        rule.extend(composite_rule(2f64.powi(j), 2f64.powi(j + 1), 1, nodes_per_block)?);
    }
    let times: Vec<f64> = rule.iter().map(|r| r.0).collect();
    let snaps = semigroup.apply(&times, rho0, u0)?;
    let solver = semigroup.solver();
    let values = snaps
        .par_iter()
        .map(|s| {
            let dt = time_derivatives(solver, s, None)?;
            let rho = Field::stack(&[&s.rho(), &s.grad_rho()])?;
            let rho_t = Field::stack(&[&dt.rho_t, &dt.grad_rho_t])?;
            let u = Field::stack(&[&s.u(), &s.jacobian(), &s.hessian()])?;
            Ok(norm(&rho)? + norm(&rho_t)? + norm(&dt.u_t)? + norm(&u)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let lhs: f64 = rule.iter().zip(&values).map(|((_, w), v)| w * v).sum();
    let rhs = norm(&Field::stack(&[rho0, &field_gradient(rho0)?])?)? + norm(u0)?;
    if !(rhs > 0.0) {
        return Err(invalid("data", "initial data must be nonzero"));
    }
    Ok(MaxRegularity { lhs, rhs, quotient: lhs / rhs, horizon: 2f64.powi(j_max + 1) })
}
