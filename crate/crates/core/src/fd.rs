//! Finite-difference resolvent solver on a truncated half-space, used as an
//! independent cross-check of the spectral solvers.
//!
//! Second-order centred differences, homogeneous Dirichlet rows at `x_N = 0`
//! and at the far boundary `x_N = X`. Coefficients depend on `x_N` only, so
//! the periodic tangential direction is diagonalized exactly by a discrete
//! Fourier transform and each tangential mode is a banded system in `x_N`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::model::ModelParams;
use crate::spectral::{Field, GridKind};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Nodes `x_N = j·h`, `j = 0..=intervals`, optionally times a periodic
/// tangential axis of length `L` with `M` points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdGrid {
    pub tangential: Option<(f64, usize)>,
    pub x_max: f64,
    pub intervals: usize,
}

impl FdGrid {
    pub fn line(x_max: f64, intervals: usize) -> Result<Self> {
        let g = Self { tangential: None, x_max, intervals };
        g.validate()?;
        Ok(g)
    }

    pub fn strip(length: f64, points: usize, x_max: f64, intervals: usize) -> Result<Self> {
        let g = Self { tangential: Some((length, points)), x_max, intervals };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        if !(self.x_max > 0.0 && self.x_max.is_finite()) || self.intervals < 4 {
            return Err(invalid("fd_grid", "need X > 0 and at least 4 intervals"));
        }
        if let Some((l, m)) = self.tangential {
            if !(l > 0.0 && l.is_finite()) || m < 4 {
                return Err(invalid("fd_grid", "need L > 0 and at least 4 tangential points"));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        if self.tangential.is_some() {
            2
        } else {
            1
        }
    }

    pub fn h(&self) -> f64 {
        self.x_max / self.intervals as f64
    }

    pub fn h_tangential(&self) -> Option<f64> {
        self.tangential.map(|(l, m)| l / m as f64)
    }

    /// Largest spacing, the `h` of the error budget.
    pub fn spacing(&self) -> f64 {
        self.h().max(self.h_tangential().unwrap_or(0.0))
    }

    pub fn normal_nodes(&self) -> usize {
        self.intervals + 1
    }

    pub fn tangential_points(&self) -> usize {
        self.tangential.map_or(1, |t| t.1)
    }

    pub fn points(&self) -> usize {
        self.tangential_points() * self.normal_nodes()
    }

    /// Coordinates of flat point `p = i·(n+1) + j`, tangential first.
    pub fn coords(&self, p: usize) -> Vec<f64> {
        let nn = self.normal_nodes();
        let x = (p % nn) as f64 * self.h();
        match self.h_tangential() {
            Some(h1) => vec![(p / nn) as f64 * h1, x],
            None => vec![x],
        }
    }

    /// `X` such that the slowest boundary-layer mode `e^{−Re√(λ/(α+β)) X}` is below `tol`.
    pub fn decay_length(lambda: Complex64, alpha: f64, beta: f64, tol: f64) -> f64 {
        (1.0 / tol).ln() / (lambda / (alpha + beta)).sqrt().re
    }
}

/// Values on an [`FdGrid`], component-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FdField {
    grid: FdGrid,
    components: usize,
    values: Vec<Complex64>,
}

impl FdField {
    pub fn zeros(grid: &FdGrid, components: usize) -> Self {
        Self { grid: *grid, components, values: vec![ZERO; components * grid.points()] }
    }

    pub fn from_fn(grid: &FdGrid, components: usize, mut f: impl FnMut(&[f64], &mut [Complex64])) -> Self {
        let n = grid.points();
        let mut out = Self::zeros(grid, components);
        let mut buf = vec![ZERO; components];
        for p in 0..n {
            buf.iter_mut().for_each(|v| *v = ZERO);
            f(&grid.coords(p), &mut buf);
            for c in 0..components {
                out.values[c * n + p] = buf[c];
            }
        }
        out
    }

    pub fn grid(&self) -> &FdGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    fn at(&self, c: usize, i: usize, j: usize) -> Complex64 {
        let nn = self.grid.normal_nodes();
        self.values[c * self.grid.points() + i * nn + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FdSystem {
    /// `λu − αΔu − β∇div u = g`.
    Lame,
    /// `λρ + η0 div u = f`, `η0λu − αΔu − β∇div u + ∇(P'(η0)ρ) = g`.
    Stokes,
}

impl FdSystem {
    fn block(self, dim: usize) -> usize {
        match self {
            Self::Lame => dim,
            Self::Stokes => dim + 1,
        }
    }
}

/// Coefficients sampled on the normal nodes.
#[derive(Debug, Clone)]
pub struct FdModel {
    pub alpha: f64,
    pub beta: f64,
    pub eta0: Vec<f64>,
    pub p_prime: Vec<f64>,
}

impl FdModel {
    /// `η0 = ρ* + η̃(x_N)`; pass `None` for constant density.
    pub fn new(model: &ModelParams, grid: &FdGrid, eta_tilde: Option<&dyn Fn(f64) -> f64>) -> Result<Self> {
        model.validate()?;
        let h = grid.h();
        let eta0: Vec<f64> = (0..grid.normal_nodes())
            .map(|j| model.rho_star + eta_tilde.map_or(0.0, |e| e(j as f64 * h)))
            .collect();
        if let Some(e) = eta0.iter().find(|e| !(**e >= model.rho1 && **e <= model.rho2)) {
            return Err(invalid("eta_tilde", format!("density {e} outside [ρ1, ρ2]")));
        }
        let p_prime = eta0.iter().map(|&e| model.p_prime_at(e)).collect();
        Ok(Self { alpha: model.alpha, beta: model.beta, eta0, p_prime })
    }
}

#[derive(Debug, Clone)]
pub struct FdSolution {
    pub field: FdField,
    /// `max|A x − b| / max|b|` of the discrete system, evaluated in physical space.
    pub residual: f64,
    /// Largest over smallest pivot modulus.
    pub condition_estimate: f64,
    /// `e^{−Re√(λ/(α+β)) X}`.
    pub far_boundary_estimate: f64,
}

/// Banded LU with partial pivoting. Row `i` stores columns
/// `i − kl ..= i + kl + ku` to leave room for pivoting fill-in.
struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    rows: Vec<Vec<Complex64>>,
}

impl Banded {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        Self { n, kl, ku, rows: vec![vec![ZERO; 2 * kl + ku + 1]; n] }
    }

    fn slot(&self, i: usize, col: usize) -> Option<usize> {
        let k = col as isize - i as isize + self.kl as isize;
        (0..(2 * self.kl + self.ku + 1) as isize).contains(&k).then_some(k as usize)
    }

    fn add(&mut self, i: usize, col: usize, v: Complex64) {
        let k = self.slot(i, col).expect("entry inside the band");
        self.rows[i][k] += v;
    }

    fn get(&self, i: usize, col: usize) -> Complex64 {
        self.slot(i, col).map_or(ZERO, |k| self.rows[i][k])
    }

    fn set(&mut self, i: usize, col: usize, v: Complex64) {
        if let Some(k) = self.slot(i, col) {
            self.rows[i][k] = v;
        }
    }

    /// Solves in place, returning the pivot-ratio condition estimate.
    fn solve(mut self, mut b: Vec<Complex64>, lambda: Complex64) -> Result<(Vec<Complex64>, f64)> {
        let n = self.n;
        let width = self.kl + self.ku;
        let (mut pmax, mut pmin) = (0.0f64, f64::INFINITY);
        for k in 0..n {
            let last = (k + self.kl).min(n - 1);
            let p = (k..=last).max_by(|&a, &c| self.get(a, k).norm().total_cmp(&self.get(c, k).norm())).unwrap();
            if p != k {
                let hi = (k + width).min(n - 1);
                for col in k..=hi {
                    let (a, c) = (self.get(k, col), self.get(p, col));
                    self.set(k, col, c);
                    self.set(p, col, a);
                }
                b.swap(k, p);
            }
            let piv = self.get(k, k);
            pmax = pmax.max(piv.norm());
            pmin = pmin.min(piv.norm());
            if !(piv.norm() > 1e-300) || pmax / pmin > 1e14 {
                return Err(LabError::SingularSystem {
                    lambda,
                    detail: format!("pivot ratio {:.3e} at row {k}", pmax / pmin),
                });
            }
            for i in k + 1..=last {
                let m = self.get(i, k) / piv;
                if m == ZERO {
                    continue;
                }
                self.set(i, k, ZERO);
                for col in k + 1..=(k + width).min(n - 1) {
                    let v = self.get(k, col);
                    if v != ZERO {
                        let k2 = self.slot(i, col).expect("fill-in inside the band");
                        self.rows[i][k2] -= m * v;
                    }
                }
                let bk = b[k];
                b[i] -= m * bk;
            }
        }
        let mut x = vec![ZERO; n];
        for i in (0..n).rev() {
            let mut s = b[i];
            for col in i + 1..=(i + width).min(n - 1) {
                s -= self.get(i, col) * x[col];
            }
            x[i] = s / self.get(i, i);
        }
        Ok((x, pmax / pmin))
    }
}

/// Tangential difference symbols of mode `k`: `D1 → i sin(κh)/h`,
/// `D11 → −(2 − 2cos κh)/h²`.
fn tangential_symbols(grid: &FdGrid, k: usize) -> (Complex64, f64) {
    match grid.tangential {
        None => (ZERO, 0.0),
        Some((l, m)) => {
            let h1 = l / m as f64;
            let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
            (I * th.sin() / h1, -(2.0 - 2.0 * th.cos()) / (h1 * h1))
        }
    }
}

/// One row of the discrete operator as `(node, component, coefficient)`
/// triples, shared by the banded assembly and the physical-space residual.
/// `d1`/`d11` are the tangential operators at the row's tangential index; the
/// callback receives the tangential shift (`−1, 0, 1`) of each entry.
struct Stencil<'a> {
    system: FdSystem,
    model: &'a FdModel,
    lambda: Complex64,
    dim: usize,
    h: f64,
    n: usize,
}

/// Entry with tangential operator tag: 0 = identity, 1 = D1, 2 = D11.
type Entry = (usize, usize, u8, Complex64);

impl Stencil<'_> {
    fn u(&self, a: usize) -> usize {
        match self.system {
            FdSystem::Lame => a,
            FdSystem::Stokes => a + 1,
        }
    }

    /// Entries of row `(j, c)`; `c` indexes the block (ρ first for Stokes).
    fn row(&self, j: usize, c: usize) -> Vec<Entry> {
        let (d, h, n, lam) = (self.dim, self.h, self.n, self.lambda);
        let (alpha, beta) = (self.model.alpha, self.model.beta);
        let nrm = d - 1;
        let un = self.u(nrm);
        let mut e: Vec<Entry> = Vec::new();
        let one = Complex64::new(1.0, 0.0);
        let r = |v: f64| Complex64::new(v, 0.0);
        if self.system == FdSystem::Stokes && c == 0 {
            let eta = self.model.eta0[j];
            e.push((j, 0, 0, lam));
            if d == 2 {
                e.push((j, self.u(0), 1, r(eta)));
            }
            let w = eta / (2.0 * h);
            if j == 0 {
                e.extend([(0, un, 0, r(-3.0 * w)), (1, un, 0, r(4.0 * w)), (2, un, 0, r(-w))]);
            } else if j == n {
                e.extend([(n, un, 0, r(3.0 * w)), (n - 1, un, 0, r(-4.0 * w)), (n - 2, un, 0, r(w))]);
            } else {
                e.extend([(j + 1, un, 0, r(w)), (j - 1, un, 0, r(-w))]);
            }
            return e;
        }
        if j == 0 || j == n {
            e.push((j, c, 0, one));
            return e;
        }
        let a = match self.system {
            FdSystem::Lame => c,
            FdSystem::Stokes => c - 1,
        };
        let shift = match self.system {
            FdSystem::Lame => lam,
            FdSystem::Stokes => lam * self.model.eta0[j],
        };
        let h2 = h * h;
        let mixed = beta / (2.0 * h);
        if a == nrm {
            e.push((j, c, 0, shift + 2.0 * (alpha + beta) / h2));
            e.push((j, c, 2, r(-alpha)));
            e.push((j + 1, c, 0, r(-(alpha + beta) / h2)));
            e.push((j - 1, c, 0, r(-(alpha + beta) / h2)));
            if d == 2 {
                let ut = self.u(0);
                e.push((j + 1, ut, 1, r(-mixed)));
                e.push((j - 1, ut, 1, r(mixed)));
            }
            if self.system == FdSystem::Stokes {
                let pp = &self.model.p_prime;
                e.push((j + 1, 0, 0, r(pp[j + 1] / (2.0 * h))));
                e.push((j - 1, 0, 0, r(-pp[j - 1] / (2.0 * h))));
            }
        } else {
            e.push((j, c, 0, shift + 2.0 * alpha / h2));
            e.push((j, c, 2, r(-(alpha + beta))));
            e.push((j + 1, c, 0, r(-alpha / h2)));
            e.push((j - 1, c, 0, r(-alpha / h2)));
            e.push((j + 1, un, 1, r(-mixed)));
            e.push((j - 1, un, 1, r(mixed)));
            if self.system == FdSystem::Stokes {
                e.push((j, 0, 1, r(self.model.p_prime[j])));
            }
        }
        e
    }
}

/// Solves the discrete resolvent problem. Data carry `N` components for the
/// Lamé system and `(f, g)` with `1 + N` for Stokes; rows on the Dirichlet
/// boundaries ignore the velocity data.
pub fn fd_resolvent(lambda: Complex64, data: &FdField, model: &FdModel, system: FdSystem) -> Result<FdSolution> {
    let grid = *data.grid();
    let d = grid.dim();
    let b = system.block(d);
    if data.components() != b {
        return Err(invalid("data", format!("expected {b} components")));
    }
    if model.eta0.len() != grid.normal_nodes() {
        return Err(LabError::GridMismatch("model coefficients do not match the normal nodes".into()));
    }
    if !(lambda.norm() > 0.0) {
        return Err(invalid("lambda", "must be nonzero"));
    }
    let n = grid.intervals;
    let nn = grid.normal_nodes();
    let mt = grid.tangential_points();
    let st = Stencil { system, model, lambda, dim: d, h: grid.h(), n };
    let rhs_of = |field: &FdField, c: usize, i: usize, j: usize| {
        let velocity = system == FdSystem::Lame || c > 0;
        if velocity && (j == 0 || j == n) {
            ZERO
        } else {
            field.at(c, i, j)
        }
    };

    // tangential DFT of the data
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(mt);
    let inv = planner.plan_fft_inverse(mt);
    let mut hat = vec![vec![ZERO; mt]; b * nn];
    for c in 0..b {
        for j in 0..nn {
            let row = &mut hat[c * nn + j];
            for (i, v) in row.iter_mut().enumerate() {
                *v = rhs_of(data, c, i, j);
            }
            fwd.process(row);
        }
    }

    let band = 3 * b;
    let mut cond: f64 = 0.0;
    let mut sol_hat = vec![vec![ZERO; mt]; b * nn];
    for k in 0..mt {
        let (d1, d11) = tangential_symbols(&grid, k);
        let mut m = Banded::new(b * nn, band, band);
        let mut rhs = vec![ZERO; b * nn];
        for j in 0..nn {
            for c in 0..b {
                let row = j * b + c;
                rhs[row] = hat[c * nn + j][k];
                for (jj, cc, tag, v) in st.row(j, c) {
                    let f = match tag {
                        0 => Complex64::new(1.0, 0.0),
                        1 => d1,
                        _ => Complex64::new(d11, 0.0),
                    };
                    m.add(row, jj * b + cc, v * f);
                }
            }
        }
        let (x, ce) = m.solve(rhs, lambda)?;
        cond = cond.max(ce);
        for j in 0..nn {
            for c in 0..b {
                sol_hat[c * nn + j][k] = x[j * b + c];
            }
        }
    }
    let mut field = FdField::zeros(&grid, b);
    let np = grid.points();
    for c in 0..b {
        for j in 0..nn {
            let row = &mut sol_hat[c * nn + j];
            inv.process(row);
            for (i, v) in row.iter().enumerate() {
                field.values[c * np + i * nn + j] = v / mt as f64;
            }
        }
    }

    // residual in physical space with periodic tangential stencils
    let h1 = grid.h_tangential().unwrap_or(1.0);
    let mut res: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..mt {
        let (ip, im) = ((i + 1) % mt, (i + mt - 1) % mt);
        for j in 0..nn {
            for c in 0..b {
                let mut acc = ZERO;
                for (jj, cc, tag, v) in st.row(j, c) {
                    let at = |ii| field.at(cc, ii, jj);
                    let op = match tag {
                        0 => at(i),
                        1 => (at(ip) - at(im)) / (2.0 * h1),
                        _ => (at(ip) - 2.0 * at(i) + at(im)) / (h1 * h1),
                    };
                    acc += v * op;
                }
                let r = rhs_of(data, c, i, j);
                res = res.max((acc - r).norm());
                scale = scale.max(r.norm());
            }
        }
    }
    let residual = if scale > 0.0 { res / scale } else { res };
    let far = (-(lambda / (model.alpha + model.beta)).sqrt().re * grid.x_max).exp();
    Ok(FdSolution { field, residual, condition_estimate: cond, far_boundary_estimate: far })
}

/// How spectral values are transferred to FD nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    /// FD nodes must coincide with spectral nodes.
    Subsample,
    /// Tangential nodes must coincide; linear in `x_N`.
    LinearNormal,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OracleReport {
    pub h: f64,
    pub l2_relative: f64,
    pub sup_relative: f64,
    /// `max(5h², 1e-6)`.
    pub threshold: f64,
    pub pass: bool,
}

fn ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let k = r.round();
    (k >= 1.0 && (r - k).abs() < 1e-9 * r).then_some(k as usize)
}

/// Compares a half-space spectral solution with an FD solution on the FD
/// nodes off the wall. The wall row is skipped: velocities vanish there on
/// both sides, and the reflected spectral density is only first-order
/// accurate at `x_N = 0` when the pressure coupling has normal data that
/// does not vanish at the wall.
pub fn compare_oracle(spectral: &Field, fd: &FdField, interp: Interpolation) -> Result<OracleReport> {
    let sg = spectral.grid();
    let g = fd.grid();
    if sg.kind() != GridKind::HalfSpace || sg.dim() != g.dim() || spectral.components() != fd.components() {
        return Err(LabError::GridMismatch("spectral and FD solutions have different shapes".into()));
    }
    let d = sg.dim();
    let ns = sg.points()[d - 1];
    let hs = sg.spacing(d - 1);
    let step_t = match g.tangential {
        None => 1,
        Some((l, m)) => {
            if (l - sg.lengths()[0]).abs() > 1e-12 * l {
                return Err(LabError::GridMismatch("tangential periods differ".into()));
            }
            ratio(sg.points()[0] as f64, m as f64)
                .ok_or_else(|| LabError::GridMismatch("tangential points are not nested".into()))?
        }
    };
    let step_n = match interp {
        Interpolation::Subsample => Some(
            ratio(g.h(), hs).ok_or_else(|| LabError::GridMismatch("normal spacings are not nested".into()))?,
        ),
        Interpolation::LinearNormal => None,
    };
    if g.x_max >= hs * (ns - 1) as f64 {
        return Err(LabError::GridMismatch("FD box extends past the spectral box".into()));
    }
    let sp = spectral.points();
    let sample = |c: usize, i: usize, j: usize| -> Complex64 {
        let base = c * sp + i * step_t * ns;
        match step_n {
            Some(s) => spectral.values()[base + j * s],
            None => {
                let x = j as f64 * g.h() / hs;
                let k = x.floor() as usize;
                let t = x - k as f64;
                spectral.values()[base + k] * (1.0 - t) + spectral.values()[base + k + 1] * t
            }
        }
    };
    let (mut diff2, mut ref2, mut dmax, mut rmax) = (0.0, 0.0, 0.0f64, 0.0f64);
    for c in 0..fd.components() {
        for i in 0..g.tangential_points() {
            for j in 1..g.normal_nodes() {
                let s = sample(c, i, j);
                let e = (s - fd.at(c, i, j)).norm();
                diff2 += e * e;
                ref2 += s.norm_sqr();
                dmax = dmax.max(e);
                rmax = rmax.max(s.norm());
            }
        }
    }
    let rel = |a: f64, b: f64| if b > 0.0 { a / b } else { a };
    let h = g.spacing();
    let threshold = (5.0 * h * h).max(1e-6);
    let sup_relative = rel(dmax, rmax);
    Ok(OracleReport {
        h,
        l2_relative: rel(diff2.sqrt(), ref2.sqrt()),
        sup_relative,
        threshold,
        pass: sup_relative < threshold,
    })
}
