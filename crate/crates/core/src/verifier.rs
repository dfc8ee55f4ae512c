//! Sweep-and-fit harness turning resolvent decay estimates into slope checks.
//!
//! Each instrumented line measures an operator-norm quotient
//! `sup_g ‖op(λ)g‖_X / ‖g‖_Y` over a probe family placed around the scale
//! `|λ|^{-1/2}`, on a grid dilated with `|λ|` so that discretization bias is
//! the same at every sample. Fitted log-log slopes are compared with the
//! predicted exponents.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::besov::{build_lp_family, BesovParams, BlockNorms, LPFamily};
use crate::error::{invalid, LabError, Result};
use crate::model::ModelParams;
use crate::operators::{field_gradient, Domain, LameSolver, Repr};
use crate::spectral::extension::Parity;
use crate::spectral::norms::{l2_norm, pairing};
use crate::spectral::{Field, GridKind, SectorParams, SectorPoint, SpectralGrid};
use crate::stokes::StokesResolvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// `‖(λ, λ^{1/2}∇̄, ∇̄²)S g‖_{B^s}` against `‖g‖_{B^s}`.
    Resolvent,
    /// The same stack of `∂_λS g`.
    ResolventDerivative,
    /// `‖(λ^{1/2}∇̄, ∇̄²)S g‖_{B^s}` against `‖g‖_{B^{s+σ}}`.
    Gradient,
    /// `‖(1, λ^{-1/2}∇̄)S g‖_{B^s}` against `‖g‖_{B^{s−σ}}`.
    Low,
    /// `‖(λ, λ^{1/2}∇̄, ∇̄²)∂_λS g‖_{B^s}` against `‖g‖_{B^{s−σ}}`.
    LowDerivative,
    /// `‖C_m(f,g)‖_{B^{s+1}}` against `‖f‖_{B^{s+1}} + ‖g‖_{B^s}`.
    Density,
    DensityDerivative,
    /// `‖(λ, λ^{1/2}∇̄, ∇̄²)C_v(f,g)‖_{B^s}` against the same data norm.
    Velocity,
    VelocityDerivative,
}

impl NormKind {
    pub const LAME: [NormKind; 5] = [
        NormKind::Resolvent,
        NormKind::ResolventDerivative,
        NormKind::Gradient,
        NormKind::Low,
        NormKind::LowDerivative,
    ];
    pub const GENERALIZED: [NormKind; 4] = [
        NormKind::Density,
        NormKind::DensityDerivative,
        NormKind::Velocity,
        NormKind::VelocityDerivative,
    ];

    pub fn theoretical_slope(self, sigma: f64) -> f64 {
        match self {
            NormKind::Resolvent => 0.0,
            NormKind::ResolventDerivative => -1.0,
            NormKind::Gradient => -sigma / 2.0,
            NormKind::Low | NormKind::LowDerivative => -(1.0 - sigma / 2.0),
            NormKind::Density | NormKind::Velocity => -1.0,
            NormKind::DensityDerivative | NormKind::VelocityDerivative => -2.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NormKind::Resolvent => "resolvent",
            NormKind::ResolventDerivative => "resolvent_derivative",
            NormKind::Gradient => "gradient",
            NormKind::Low => "low",
            NormKind::LowDerivative => "low_derivative",
            NormKind::Density => "density",
            NormKind::DensityDerivative => "density_derivative",
            NormKind::Velocity => "velocity",
            NormKind::VelocityDerivative => "velocity_derivative",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecaySample {
    pub lambda_abs: f64,
    pub lambda_arg: f64,
    pub norm_value: f64,
    pub norm_kind: NormKind,
    /// Set when the operator failed at this `λ`; `norm_value` is then NaN.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFitReport {
    pub norm_kind: NormKind,
    pub lambda_arg: f64,
    pub fitted_slope: f64,
    pub theoretical_slope: f64,
    pub intercept: f64,
    /// Largest residual of the fit in natural-log units.
    pub max_abs_residual: f64,
    pub sample_count: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Evaluates `op` at every `λ`, keeping failures as marked samples.
pub fn sweep_decay(
    op: &(dyn Fn(&SectorPoint) -> Result<f64> + Sync),
    lambdas: &[SectorPoint],
    kind: NormKind,
) -> Vec<DecaySample> {
    lambdas
        .par_iter()
        .map(|lam| {
            let (norm_value, failure) = match op(lam) {
                Ok(v) if v.is_finite() && v >= 0.0 => (v, None),
                Ok(v) => (f64::NAN, Some(format!("operator returned {v}"))),
                Err(e) => (f64::NAN, Some(e.to_string())),
            };
            DecaySample {
                lambda_abs: lam.modulus(),
                lambda_arg: lam.arg(),
                norm_value,
                norm_kind: kind,
                failure,
            }
        })
        .collect()
}

/// Least-squares slope of `log norm` against `log|λ|`. Needs at least five
/// successful samples at one argument spanning two decades.
pub fn fit_decay_exponent(samples: &[DecaySample], theoretical_slope: f64, tolerance: f64) -> Result<DecayFitReport> {
    let ok: Vec<&DecaySample> = samples.iter().filter(|s| s.failure.is_none()).collect();
    if ok.len() < 5 {
        return Err(LabError::InsufficientSamples(format!("{} usable samples, need 5", ok.len())));
    }
    let arg = ok[0].lambda_arg;
    if ok.iter().any(|s| (s.lambda_arg - arg).abs() > 1e-9) {
        return Err(invalid("samples", "fit requires a fixed argument"));
    }
    if ok.iter().any(|s| !(s.norm_value > 0.0)) {
        return Err(invalid("samples", "log-log fit needs positive norms"));
    }
    let (lo, hi) = ok.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.lambda_abs), hi.max(s.lambda_abs)));
    if (hi / lo).log10() < 2.0 - 1e-9 {
        return Err(LabError::InsufficientSamples(format!(
            "|lambda| spans {:.2} decades, need 2",
            (hi / lo).log10()
        )));
    }
    let xs: Vec<f64> = ok.iter().map(|s| s.lambda_abs.ln()).collect();
    let ys: Vec<f64> = ok.iter().map(|s| s.norm_value.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_abs_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(DecayFitReport {
        norm_kind: ok[0].norm_kind,
        lambda_arg: arg,
        fitted_slope: slope,
        theoretical_slope,
        intercept,
        max_abs_residual,
        sample_count: ok.len(),
        tolerance,
        pass: (slope - theoretical_slope).abs() <= tolerance,
    })
}

/// `{0, ±(π−ε)/2, ±(π−ε)}`.
pub fn sector_arguments(epsilon: f64) -> Vec<f64> {
    let t = PI - epsilon;
    vec![0.0, t / 2.0, -t / 2.0, t, -t]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub lambda_start: f64,
    pub doublings: u32,
    /// Samples per doubling of `|λ|`.
    pub per_octave: u32,
    pub epsilon: f64,
    pub args: Vec<f64>,
    pub tolerance: f64,
    /// Injected factor `|λ|^{shift}` on every measured norm.
    pub slope_shift: f64,
}

impl SweepSpec {
    /// `|λ| = λ_start·2^j`, `j = 0..=12`, five arguments, tolerance 0.15.
    pub fn standard(lambda_start: f64, epsilon: f64) -> Self {
        Self {
            lambda_start,
            doublings: 12,
            per_octave: 1,
            epsilon,
            args: sector_arguments(epsilon),
            tolerance: 0.15,
            slope_shift: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_start > 0.0) || self.per_octave == 0 || self.args.is_empty() {
            return Err(invalid("sweep", "need lambda_start > 0, per_octave >= 1 and arguments"));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid("tolerance", "must be positive"));
        }
        let sector = self.sector()?;
        for &a in &self.args {
            sector.polar(self.lambda_start, a)?;
        }
        Ok(())
    }

    pub fn sector(&self) -> Result<SectorParams> {
        SectorParams::new(self.epsilon, self.lambda_start * (1.0 - 1e-12))
    }

    pub fn moduli(&self) -> Vec<f64> {
        let steps = self.doublings * self.per_octave;
        (0..=steps)
            .map(|j| self.lambda_start * 2f64.powf(j as f64 / self.per_octave as f64))
            .collect()
    }
}

/// Grid family dilated with `|λ|`: all lengths scale like `|λ|^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveGrid {
    pub domain: Domain,
    /// Points per axis of the periodic box.
    pub periodic_points: usize,
    pub tangential_points: usize,
    /// Normal nodes per length `|λ|^{-1/2}`.
    pub normal_resolution: f64,
    /// Sector opening used to size the normal box.
    pub epsilon: f64,
    /// `max(α, α+β)`: the slowest boundary-layer decay.
    pub slowest: f64,
}

impl AdaptiveGrid {
    pub fn new(domain: Domain, model: &ModelParams, epsilon: f64) -> Self {
        Self {
            domain,
            periodic_points: 64,
            tangential_points: 16,
            normal_resolution: 6.0,
            epsilon,
            slowest: model.alpha.max(model.alpha + model.beta),
        }
    }

    pub fn grid(&self, modulus: f64) -> Result<SpectralGrid> {
        let s = modulus.sqrt();
        match self.domain {
            Domain::WholeSpace => {
                let l = 16.0 * PI / s;
                SpectralGrid::periodic(&[l, l], &[self.periodic_points, self.periodic_points])
            }
            Domain::HalfSpace => {
                let decay = s * (self.epsilon / 2.0).sin() / self.slowest.sqrt();
                let x_max = 1.05 * 1e12f64.ln() / decay;
                let n = ((x_max * s * self.normal_resolution).ceil() as usize).next_power_of_two();
                SpectralGrid::half_space(&[8.0 * PI / s], &[self.tangential_points], x_max, n)
            }
        }
    }

    fn check_grid(grid: &SpectralGrid) -> Result<()> {
        if grid.dim() != 2 {
            return Err(invalid("grid", "probe families are two-dimensional"));
        }
        Ok(())
    }

    /// Vector probes: single modes on the box, tangential modes times normal
    /// Gaussians on the half-space, in both polarizations.
    pub fn vector_probes(&self, grid: &SpectralGrid, modulus: f64) -> Result<Vec<Field>> {
        Self::check_grid(grid)?;
        let s = modulus.sqrt();
        let mut out = Vec::new();
        match grid.kind() {
            GridKind::PeriodicBox => {
                let step = 2.0 * PI / grid.lengths()[0];
                out.push(Field::from_fn(grid, 2, |_, o| o[0] = Complex64::new(1.0, 0.0)));
                for k in [1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0] {
                    for pol in 0..2 {
                        out.push(Field::from_fn(grid, 2, |x, o| o[pol] = Complex64::from_polar(1.0, k * step * x[0])));
                    }
                }
            }
            GridKind::HalfSpace => {
                let step = 2.0 * PI / grid.lengths()[0];
                for k in [0.0, 2.0, 4.0] {
                    for delta in [0.5 / s, 2.0 / s] {
                        for pol in 0..2 {
                            out.push(Field::from_fn(grid, 2, |x, o| {
                                let b = (-((x[1] - 4.0 * delta) / delta).powi(2)).exp();
                                o[pol] = Complex64::from_polar(b, k * step * x[0]);
                            }));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Scalar probes with vanishing normal derivative at the wall.
    pub fn scalar_probes(&self, grid: &SpectralGrid, modulus: f64) -> Result<Vec<Field>> {
        Self::check_grid(grid)?;
        let s = modulus.sqrt();
        let step = 2.0 * PI / grid.lengths()[0];
        let mut out = Vec::new();
        match grid.kind() {
            GridKind::PeriodicBox => {
                for k in [0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 24.0] {
                    out.push(Field::scalar_fn(grid, |x| Complex64::from_polar(1.0, k * step * x[0])));
                }
            }
            GridKind::HalfSpace => {
                for k in [0.0, 2.0, 4.0] {
                    for delta in [0.5 / s, 2.0 / s] {
                        out.push(Field::scalar_fn(grid, |x| {
                            Complex64::from_polar((-(x[1] / delta).powi(2)).exp(), k * step * x[0])
                        }));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// An operator family `λ ↦ S(λ)` with data probes.
pub trait ResolventFamily: Sync {
    fn label(&self) -> String;
    fn grid(&self, modulus: f64) -> Result<SpectralGrid>;
    fn probes(&self, grid: &SpectralGrid, modulus: f64) -> Result<Vec<Field>>;
    /// `(S(λ)g, ∂_λS(λ)g)`.
    fn apply(&self, grid: &SpectralGrid, lambda: Complex64, g: &Field) -> Result<(Repr, Repr)>;
}

/// Lamé resolvent on either domain, with `∂_λS = −S²`.
#[derive(Debug, Clone)]
pub struct LameFamily {
    pub model: ModelParams,
    pub grids: AdaptiveGrid,
}

impl LameFamily {
    pub fn new(model: &ModelParams, domain: Domain, epsilon: f64) -> Self {
        Self {
            model: model.clone(),
            grids: AdaptiveGrid::new(domain, model, epsilon),
        }
    }
}

impl ResolventFamily for LameFamily {
    fn label(&self) -> String {
        format!("lame-{:?}", self.grids.domain).to_lowercase()
    }

    fn grid(&self, modulus: f64) -> Result<SpectralGrid> {
        self.grids.grid(modulus)
    }

    fn probes(&self, grid: &SpectralGrid, modulus: f64) -> Result<Vec<Field>> {
        self.grids.vector_probes(grid, modulus)
    }

    fn apply(&self, grid: &SpectralGrid, lambda: Complex64, g: &Field) -> Result<(Repr, Repr)> {
        let solver = LameSolver::new(&self.model, grid)?;
        let prep = solver.prepare(lambda)?;
        let u = prep.solve(g)?;
        let du = prep.solve(&u.evaluate()?)?.scaled(Complex64::new(-1.0, 0.0));
        Ok((u, du))
    }
}

/// `u`, `∇u`, `∇²u`: coefficients on a periodic box, values on a half-space.
struct Pieces {
    fields: [Field; 3],
}

impl Pieces {
    fn sub_scaled(&self, other: &Pieces, scale: Complex64) -> Result<Pieces> {
        let f = |i: usize| -> Result<Field> { Ok(self.fields[i].sub(&other.fields[i])?.scaled(scale)) };
        Ok(Pieces { fields: [f(0)?, f(1)?, f(2)?] })
    }
}

struct NormEngine {
    lp: LPFamily,
    besov: BesovParams,
    periodic: bool,
}

impl NormEngine {
    fn new(grid: &SpectralGrid, besov: BesovParams) -> Result<Self> {
        let periodic = grid.kind() == GridKind::PeriodicBox;
        let lp = if periodic { build_lp_family(grid)? } else { build_lp_family(&grid.extended_box()?)? };
        Ok(Self { lp, besov, periodic })
    }

    /// Grid values; half-space fields are zero-extended.
    fn values(&self, f: &Field) -> Result<BlockNorms> {
        self.lp.block_norms(f, self.besov.q)
    }

    /// Scalar grid values; half-space fields are reflected evenly.
    fn even(&self, f: &Field) -> Result<BlockNorms> {
        if self.periodic {
            self.values(f)
        } else {
            self.lp.block_norms_reflected(f, &vec![Parity::Even; f.components()], self.besov.q)
        }
    }

    fn pieces(&self, r: &Repr) -> Result<Pieces> {
        let jac = r.jacobian()?;
        let hess = jac.jacobian()?;
        let raw = |r: &Repr| -> Result<Field> {
            match r {
                Repr::Periodic(spec) => Ok(spec.clone()),
                Repr::Half(h) => h.evaluate(),
            }
        };
        Ok(Pieces { fields: [raw(r)?, raw(&jac)?, raw(&hess)?] })
    }

    fn piece_norms(&self, f: &Field) -> Result<BlockNorms> {
        if self.periodic {
            self.lp.block_norms_from_spectrum(f, self.besov.q)
        } else {
            self.values(f)
        }
    }

    /// Block norms of the stack `(w_i · piece_{k_i})_i`.
    fn stack(&self, p: &Pieces, weights: &[(usize, Complex64)]) -> Result<BlockNorms> {
        if self.besov.q == 2.0 {
            let norms = p.fields.iter().map(|f| self.piece_norms(f)).collect::<Result<Vec<_>>>()?;
            let mut low = 0.0;
            let mut blocks = vec![0.0; norms[0].blocks.len()];
            for &(k, w) in weights {
                let w2 = w.norm_sqr();
                low += w2 * norms[k].low.powi(2);
                for (b, v) in blocks.iter_mut().zip(&norms[k].blocks) {
                    *b += w2 * v * v;
                }
            }
            Ok(BlockNorms {
                low: low.sqrt(),
                blocks: blocks.into_iter().map(f64::sqrt).collect(),
            })
        } else {
            let parts: Vec<Field> = weights.iter().map(|&(k, w)| p.fields[k].scaled(w)).collect();
            self.piece_norms(&Field::stack(&parts.iter().collect::<Vec<_>>())?)
        }
    }

    fn besov(&self, n: &BlockNorms, s: f64) -> f64 {
        n.besov(s, self.besov.r)
    }
}

fn resolvent_weights(lambda: Complex64) -> Vec<(usize, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let sq = lambda.sqrt();
    vec![(0, lambda), (0, sq), (1, sq), (0, one), (1, one), (2, one)]
}

fn gradient_weights(lambda: Complex64) -> Vec<(usize, Complex64)> {
    let one = Complex64::new(1.0, 0.0);
    let sq = lambda.sqrt();
    vec![(0, sq), (1, sq), (0, one), (1, one), (2, one)]
}

fn low_weights(lambda: Complex64) -> Vec<(usize, Complex64)> {
    let isq = 1.0 / lambda.sqrt();
    vec![(0, Complex64::new(1.0, 0.0)), (0, isq), (1, isq)]
}

/// Outcome of a full sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SqrReport {
    pub label: String,
    pub besov: BesovParams,
    pub sweep: SweepSpec,
    pub samples: Vec<DecaySample>,
    pub fits: Vec<DecayFitReport>,
    /// Per line, largest spread of fitted slopes across arguments.
    pub argument_spread: Vec<(NormKind, f64)>,
    /// Per fit, whether shifting the data by `|λ|^{±1/2}` flips the verdict.
    pub negative_controls: Vec<(NormKind, f64, bool)>,
    pub pass: bool,
}

impl SqrReport {
    pub fn fit(&self, kind: NormKind, arg: f64) -> Option<&DecayFitReport> {
        self.fits
            .iter()
            .find(|f| f.norm_kind == kind && (f.lambda_arg - arg).abs() < 1e-9)
    }

    pub fn negative_controls_detected(&self) -> bool {
        self.negative_controls.iter().all(|c| c.2)
    }
}

type SampleRow = std::result::Result<Vec<(NormKind, f64)>, String>;

fn assemble(
    label: String,
    besov: BesovParams,
    spec: &SweepSpec,
    kinds: &[NormKind],
    rows: Vec<((f64, f64), SampleRow)>,
) -> Result<SqrReport> {
    let sigma = besov.sigma.unwrap_or(0.0);
    let mut samples = Vec::new();
    for ((modulus, arg), row) in &rows {
        let shift = modulus.powf(spec.slope_shift);
        for &kind in kinds {
            let (norm_value, failure) = match row {
                Ok(vals) => (vals.iter().find(|v| v.0 == kind).map_or(f64::NAN, |v| v.1 * shift), None),
                Err(e) => (f64::NAN, Some(e.clone())),
            };
            samples.push(DecaySample {
                lambda_abs: *modulus,
                lambda_arg: *arg,
                norm_value,
                norm_kind: kind,
                failure,
            });
        }
    }
    let mut fits = Vec::new();
    let mut negative_controls = Vec::new();
    let mut argument_spread = Vec::new();
    for &kind in kinds {
        let theory = kind.theoretical_slope(sigma);
        let mut slopes = Vec::new();
        for &arg in &spec.args {
            let sel: Vec<DecaySample> = samples
                .iter()
                .filter(|s| s.norm_kind == kind && s.lambda_arg == arg)
                .cloned()
                .collect();
            let fit = fit_decay_exponent(&sel, theory, spec.tolerance)?;
            let detected = [-0.5, 0.5].iter().all(|&d| {
                let shifted: Vec<DecaySample> = sel
                    .iter()
                    .map(|s| DecaySample { norm_value: s.norm_value * s.lambda_abs.powf(d), ..s.clone() })
                    .collect();
                fit_decay_exponent(&shifted, theory, spec.tolerance).map_or(true, |f| !f.pass)
            });
            negative_controls.push((kind, arg, detected));
            slopes.push(fit.fitted_slope);
            fits.push(fit);
        }
        let spread = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - slopes.iter().cloned().fold(f64::INFINITY, f64::min);
        argument_spread.push((kind, spread));
    }
    let pass = fits.iter().all(|f| f.pass);
    Ok(SqrReport {
        label,
        besov,
        sweep: spec.clone(),
        samples,
        fits,
        argument_spread,
        negative_controls,
        pass,
    })
}

fn require_sigma(besov: &BesovParams) -> Result<f64> {
    let sigma = besov
        .sigma
        .ok_or_else(|| invalid("sigma", "decay verification needs sigma"))?;
    besov.check_sigma_window()?;
    Ok(sigma)
}

fn lame_row(
    family: &dyn ResolventFamily,
    besov: BesovParams,
    sigma: f64,
    modulus: f64,
    args: &[f64],
) -> Result<Vec<Vec<(NormKind, f64)>>> {
    let grid = family.grid(modulus)?;
    let engine = NormEngine::new(&grid, besov)?;
    let probes = family.probes(&grid, modulus)?;
    let s = besov.s;
    let probe_norms = probes.iter().map(|g| engine.values(g)).collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(args.len());
    for &arg in args {
        let lambda = Complex64::from_polar(modulus, arg);
        let mut best = [0.0f64; 5];
        for (g, gn) in probes.iter().zip(&probe_norms) {
            let (u, du) = family.apply(&grid, lambda, g)?;
            let (pu, pdu) = (engine.pieces(&u)?, engine.pieces(&du)?);
            let res = engine.besov(&engine.stack(&pu, &resolvent_weights(lambda))?, s);
            let grad = engine.besov(&engine.stack(&pu, &gradient_weights(lambda))?, s);
            let low = engine.besov(&engine.stack(&pu, &low_weights(lambda))?, s);
            let dres = engine.besov(&engine.stack(&pdu, &resolvent_weights(lambda))?, s);
            let (g0, gp, gm) = (engine.besov(gn, s), engine.besov(gn, s + sigma), engine.besov(gn, s - sigma));
            let q = [res / g0, dres / g0, grad / gp, low / gm, dres / gm];
            for (b, v) in best.iter_mut().zip(q) {
                *b = b.max(v);
            }
        }
        rows.push(NormKind::LAME.iter().cloned().zip(best).collect());
    }
    Ok(rows)
}

/// Runs the five Lamé decay lines over the sweep.
pub fn verify_sqr_properties(family: &dyn ResolventFamily, besov: &BesovParams, spec: &SweepSpec) -> Result<SqrReport> {
    let sigma = require_sigma(besov)?;
    spec.validate()?;
    let moduli = spec.moduli();
    let rows: Vec<Vec<((f64, f64), SampleRow)>> = moduli
        .par_iter()
        .map(|&m| {
            let keys: Vec<(f64, f64)> = spec.args.iter().map(|&a| (m, a)).collect();
            match lame_row(family, *besov, sigma, m, &spec.args) {
                Ok(r) => keys.into_iter().zip(r.into_iter().map(Ok)).collect(),
                Err(e) => keys.into_iter().map(|k| (k, Err(e.to_string()))).collect(),
            }
        })
        .collect();
    assemble(family.label(), *besov, spec, &NormKind::LAME, rows.into_iter().flatten().collect())
}

/// Stokes family for the generalized resolvent lines, constant density.
#[derive(Debug, Clone)]
pub struct StokesFamily {
    pub model: ModelParams,
    pub grids: AdaptiveGrid,
    /// Relative step of the central difference in `λ`.
    pub step: f64,
}

impl StokesFamily {
    pub fn new(model: &ModelParams, domain: Domain, epsilon: f64) -> Self {
        Self {
            model: model.clone(),
            grids: AdaptiveGrid::new(domain, model, epsilon),
            step: 1e-3,
        }
    }

    fn row(&self, besov: BesovParams, modulus: f64, args: &[f64]) -> Result<Vec<Vec<(NormKind, f64)>>> {
        let grid = self.grids.grid(modulus)?;
        let engine = NormEngine::new(&grid, besov)?;
        let solver = StokesResolvent::new(&self.model, &grid)?;
        let s = besov.s;
        let zero_f = Field::zeros(&grid, 1);
        let zero_g = Field::zeros(&grid, 2);
        let mut data: Vec<(Field, Field, f64)> = Vec::new();
        for f in self.grids.scalar_probes(&grid, modulus)? {
            let n = engine.besov(&engine.even(&f)?, s + 1.0);
            data.push((f, zero_g.clone(), n));
        }
        for g in self.grids.vector_probes(&grid, modulus)? {
            let n = engine.besov(&engine.values(&g)?, s);
            data.push((zero_f.clone(), g, n));
        }
        let mut rows = Vec::with_capacity(args.len());
        for &arg in args {
            let lambda = Complex64::from_polar(modulus, arg);
            let dl = lambda * self.step;
            let weights = resolvent_weights(lambda);
            let mut best = [0.0f64; 4];
            for (f, g, dn) in &data {
                let at = |l: Complex64| -> Result<(Field, Pieces)> {
                    let sp = solver.split(l, f, g)?;
                    Ok((sp.c_m, engine.pieces(&sp.c_v)?))
                };
                let (cm, cv) = at(lambda)?;
                let (cm_p, cv_p) = at(lambda + dl)?;
                let (cm_m, cv_m) = at(lambda - dl)?;
                let inv = 1.0 / (2.0 * dl);
                let dcm = cm_p.sub(&cm_m)?.scaled(inv);
                let dcv = cv_p.sub_scaled(&cv_m, inv)?;
                let q = [
                    engine.besov(&engine.even(&cm)?, s + 1.0) / dn,
                    engine.besov(&engine.even(&dcm)?, s + 1.0) / dn,
                    engine.besov(&engine.stack(&cv, &weights)?, s) / dn,
                    engine.besov(&engine.stack(&dcv, &weights)?, s) / dn,
                ];
                for (b, v) in best.iter_mut().zip(q) {
                    *b = b.max(v);
                }
            }
            rows.push(NormKind::GENERALIZED.iter().cloned().zip(best).collect());
        }
        Ok(rows)
    }
}

/// Runs the four generalized-resolvent lines of the Stokes split over the sweep.
pub fn verify_generalized_resolvent(family: &StokesFamily, besov: &BesovParams, spec: &SweepSpec) -> Result<SqrReport> {
    spec.validate()?;
    if !family.model.is_constant_density() {
        return Err(invalid("model", "generalized-resolvent sweeps use constant density"));
    }
    let rows: Vec<Vec<((f64, f64), SampleRow)>> = spec
        .moduli()
        .par_iter()
        .map(|&m| {
            let keys: Vec<(f64, f64)> = spec.args.iter().map(|&a| (m, a)).collect();
            match family.row(*besov, m, &spec.args) {
                Ok(r) => keys.into_iter().zip(r.into_iter().map(Ok)).collect(),
                Err(e) => keys.into_iter().map(|k| (k, Err(e.to_string()))).collect(),
            }
        })
        .collect();
    let label = format!("stokes-{:?}", family.grids.domain).to_lowercase();
    assemble(label, *besov, spec, &NormKind::GENERALIZED, rows.into_iter().flatten().collect())
}

type Op<'a> = &'a (dyn Fn(Complex64, &Field) -> Result<Field> + Sync);

/// `Q1`, `Q2` and their transposes for the bilinear pairing.
pub struct AdjointOps<'a> {
    pub q1: Op<'a>,
    pub q1_adjoint: Op<'a>,
    pub q2: Op<'a>,
    pub q2_adjoint: Op<'a>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdjointRatio {
    pub label: String,
    /// Largest normalized ratio over probes and the sweep.
    pub max: f64,
    /// Largest ratio over the upper half of the sweep divided by the largest
    /// over the lower half; values near one indicate a uniform bound.
    pub growth: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdjointReport {
    pub ratios: Vec<AdjointRatio>,
    /// `max |(Qf, φ) − (f, Q*φ)| / (‖f‖‖φ‖)` over both operators.
    pub duality_defect: f64,
}

fn w1_norm(f: &Field) -> Result<f64> {
    let mut acc = l2_norm(f).powi(2);
    for c in 0..f.components() {
        acc += l2_norm(&field_gradient(&f.extract(c))?).powi(2);
    }
    Ok(acc.sqrt())
}

/// Measures the eight ratio families bounding `Q1` (order zero) and `Q2`
/// (order `λ⁻¹`) and their transposes, plus the duality defect.
pub fn check_adjoint_assumptions(ops: &AdjointOps<'_>, probes: &[Field], lambdas: &[SectorPoint]) -> Result<AdjointReport> {
    if probes.len() < 2 || lambdas.len() < 2 {
        return Err(LabError::InsufficientSamples("need two probes and two lambdas".into()));
    }
    let names = [
        "Q1 L2/L2",
        "Q1 W1/W1",
        "Q1 L2 vs |l|^-1/2 W1",
        "Q1* L2/L2",
        "Q1* W1/W1",
        "Q1* L2 vs |l|^-1/2 W1",
        "Q2 L2 vs |l|^-1 L2",
        "Q2 W1 vs |l|^-1 W1",
        "Q2 W1 vs |l|^-1/2 L2",
        "Q2* L2 vs |l|^-1 L2",
        "Q2* W1 vs |l|^-1 W1",
        "Q2* W1 vs |l|^-1/2 L2",
    ];
    let norms = probes
        .iter()
        .map(|f| Ok((l2_norm(f), w1_norm(f)?)))
        .collect::<Result<Vec<_>>>()?;
    let per_lambda = lambdas
        .iter()
        .map(|lam| {
            let l = lam.lambda();
            let m = lam.modulus();
            let mut best = [0.0f64; 12];
            let mut defect: f64 = 0.0;
            for (i, f) in probes.iter().enumerate() {
                let (fl, fw) = norms[i];
                let outs = [(ops.q1)(l, f)?, (ops.q1_adjoint)(l, f)?, (ops.q2)(l, f)?, (ops.q2_adjoint)(l, f)?];
                let mut r = Vec::with_capacity(12);
                for (j, o) in outs.iter().enumerate() {
                    let (ol, ow) = (l2_norm(o), w1_norm(o)?);
                    if j < 2 {
                        r.extend([ol / fl, ow / fw, ol / (fw / m.sqrt())]);
                    } else {
                        r.extend([ol / (fl / m), ow / (fw / m), ow / (fl / m.sqrt())]);
                    }
                }
                for (b, v) in best.iter_mut().zip(r) {
                    *b = b.max(v);
                }
                let phi = &probes[(i + 1) % probes.len()];
                let scale = fl * l2_norm(phi);
                let d1 = pairing(&outs[0], phi)? - pairing(f, &(ops.q1_adjoint)(l, phi)?)?;
                let d2 = pairing(&outs[2], phi)? - pairing(f, &(ops.q2_adjoint)(l, phi)?)?;
                defect = defect.max(d1.norm().max(d2.norm()) / scale);
            }
            Ok((best, defect))
        })
        .collect::<Result<Vec<_>>>()?;
    let half = per_lambda.len() / 2;
    let ratios = names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let lo = per_lambda[..half].iter().map(|r| r.0[k]).fold(0.0, f64::max);
            let hi = per_lambda[half..].iter().map(|r| r.0[k]).fold(0.0, f64::max);
            AdjointRatio {
                label: name.to_string(),
                max: lo.max(hi),
                growth: if lo > 0.0 { hi / lo } else { f64::INFINITY },
            }
        })
        .collect();
    let duality_defect = per_lambda.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(AdjointReport { ratios, duality_defect })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(f: impl Fn(f64) -> f64) -> Vec<DecaySample> {
        SweepSpec::standard(1.0, 0.5)
            .moduli()
            .into_iter()
            .map(|m| DecaySample {
                lambda_abs: m,
                lambda_arg: 0.0,
                norm_value: f(m),
                norm_kind: NormKind::Resolvent,
                failure: None,
            })
            .collect()
    }

    #[test]
    fn exact_power_laws() {
        let r = fit_decay_exponent(&samples(|m| 3.0 / m), -1.0, 0.15).unwrap();
        assert!((r.fitted_slope + 1.0).abs() < 1e-10 && r.pass);
        let r = fit_decay_exponent(&samples(|m| 1.0 / (m * m)), -2.0, 0.15).unwrap();
        assert!((r.fitted_slope + 2.0).abs() < 1e-10);
        assert!(r.max_abs_residual < 1e-10);
    }

    #[test]
    fn rejects_short_sweeps() {
        let s = samples(|m| m);
        assert!(fit_decay_exponent(&s[..4], 1.0, 0.15).is_err());
        assert!(fit_decay_exponent(&s[..6], 1.0, 0.15).is_err());
    }

    #[test]
    fn scalar_family_sweep() {
        let spec = SweepSpec::standard(1.0, 0.5);
        let sector = spec.sector().unwrap();
        let lams: Vec<SectorPoint> = spec.moduli().iter().map(|&m| sector.polar(m, 0.0).unwrap()).collect();
        let out = sweep_decay(&|l: &SectorPoint| Ok(2.0 / l.modulus()), &lams, NormKind::Resolvent);
        assert!(out.iter().all(|s| (s.norm_value * s.lambda_abs - 2.0).abs() < 1e-12));
        let failing = sweep_decay(&|_: &SectorPoint| Err(invalid("x", "boom")), &lams, NormKind::Resolvent);
        assert!(failing.iter().all(|s| s.failure.is_some()));
    }

    #[test]
    fn identity_adjoint_pair() {
        let grid = SpectralGrid::periodic(&[2.0 * PI], &[32]).unwrap();
        let probes: Vec<Field> = (1..4)
            .map(|k| Field::scalar_fn(&grid, |x| Complex64::new((k as f64 * x[0]).sin(), 0.0)))
            .collect();
        let sector = SectorParams::new(0.5, 1.0).unwrap();
        let lams: Vec<SectorPoint> = [1.0, 4.0, 16.0, 64.0].iter().map(|&m| sector.polar(m, 0.3).unwrap()).collect();
        let id = |_: Complex64, f: &Field| Ok(f.clone());
        let inv = |l: Complex64, f: &Field| Ok(f.scaled(1.0 / l));
        let ops = AdjointOps { q1: &id, q1_adjoint: &id, q2: &inv, q2_adjoint: &inv };
        let rep = check_adjoint_assumptions(&ops, &probes, &lams).unwrap();
        assert!(rep.duality_defect < 1e-14);
        assert!((rep.ratios[0].max - 1.0).abs() < 1e-12);
        assert!((rep.ratios[6].max - 1.0).abs() < 1e-12);
    }
}
