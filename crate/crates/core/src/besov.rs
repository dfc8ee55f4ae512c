//! Littlewood–Paley decomposition and discrete Besov norms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::spectral::extension::{extend, Parity};
use crate::spectral::multiplier::for_each_frequency;
use crate::spectral::norms::{lq_norm, validate_q};
use crate::spectral::transform::{forward, inverse};
use crate::spectral::{Field, GridKind, SpectralGrid};

/// Minimum points per axis needed to hold one full annulus.
pub const MIN_LP_POINTS: usize = 16;

/// Exponents `(s, q, r)` and the optional shift `σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovParams {
    pub s: f64,
    pub q: f64,
    /// Summation exponent; `f64::INFINITY` selects the supremum.
    pub r: f64,
    pub sigma: Option<f64>,
}

impl BesovParams {
    pub fn new(s: f64, q: f64, r: f64) -> Result<Self> {
        validate_q(q)?;
        if q.is_infinite() {
            return Err(invalid("q", "must be finite"));
        }
        if !(r >= 1.0) {
            return Err(invalid("r", format!("{r} must be at least 1")));
        }
        if !s.is_finite() {
            return Err(invalid("s", "must be finite"));
        }
        Ok(Self { s, q, r, sigma: None })
    }

    pub fn with_sigma(mut self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) {
            return Err(invalid("sigma", "must be positive"));
        }
        self.sigma = Some(sigma);
        self.check_sigma_window()?;
        Ok(self)
    }

    /// Same `(q, r)` with smoothness `s`.
    pub fn at(&self, s: f64) -> Self {
        Self { s, ..*self }
    }

    /// `−1 + 1/q < s < 1/q`.
    pub fn check_boundary_window(&self) -> Result<()> {
        let (lo, hi) = (-1.0 + 1.0 / self.q, 1.0 / self.q);
        if !(lo < self.s && self.s < hi) {
            return Err(LabError::ExponentWindow(format!(
                "-1 + 1/q < s < 1/q violated: s = {}, window ({lo}, {hi})",
                self.s
            )));
        }
        Ok(())
    }

    /// `−1 + 1/q < s − σ < s + σ < 1/q`.
    pub fn check_sigma_window(&self) -> Result<()> {
        let sigma = self.sigma.ok_or_else(|| invalid("sigma", "not set"))?;
        let lo = -1.0 + 1.0 / self.q;
        let hi = 1.0 / self.q;
        if !(lo < self.s - sigma) {
            return Err(LabError::ExponentWindow(format!(
                "-1 + 1/q < s - sigma violated: s - sigma = {} <= {lo}",
                self.s - sigma
            )));
        }
        if !(self.s + sigma < hi) {
            return Err(LabError::ExponentWindow(format!(
                "s + sigma < 1/q violated: s + sigma = {} >= {hi}",
                self.s + sigma
            )));
        }
        Ok(())
    }
}

/// The bump `exp(−1/(1−t²))` on `(−1, 1)`.
pub fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

fn bump_sum(u: f64) -> f64 {
    let m0 = u.floor() as i64;
    (m0 - 1..=m0 + 2).map(|m| bump(u - m as f64)).sum()
}

/// Dyadic window `φ(2^{−k}ξ)` as a function of `|ξ|`, supported in
/// `2^{k−1} < |ξ| < 2^{k+1}`.
pub fn phi_k(k: i32, xi_abs: f64) -> f64 {
    if xi_abs <= 0.0 {
        return 0.0;
    }
    let u = xi_abs.log2();
    let t = u - k as f64;
    if t.abs() >= 1.0 {
        return 0.0;
    }
    bump(t) / bump_sum(u)
}

/// Low-pass window `ψ = Σ_{k≤0} φ(2^{−k}·)`, equal to 1 for `|ξ| ≤ 1/2`.
pub fn psi(xi_abs: f64) -> f64 {
    if xi_abs <= 0.5 {
        return 1.0;
    }
    if xi_abs >= 2.0 {
        return 0.0;
    }
    phi_k(0, xi_abs) + phi_k(-1, xi_abs)
}

/// Windows sampled on the frequencies of one periodic grid.
#[derive(Debug, Clone)]
pub struct LPFamily {
    grid: SpectralGrid,
    k_max: i32,
    xi_abs: Vec<f64>,
    // per frequency: ψ, and φ_k, φ_{k+1} for k = floor(log2|ξ|)
    low_w: Vec<f64>,
    k_floor: Vec<i32>,
    pair_w: Vec<[f64; 2]>,
}

/// `‖ψ*f‖_q` and `‖φ_k*f‖_q` for `k = 1..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockNorms {
    pub low: f64,
    pub blocks: Vec<f64>,
}

impl BlockNorms {
    /// `‖ψ*f‖ + ‖(2^{sk}‖φ_k*f‖)_k‖_{ℓ^r}`.
    pub fn besov(&self, s: f64, r: f64) -> f64 {
        let weighted = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| 2f64.powf(s * (i + 1) as f64) * b);
        let high = if r.is_infinite() {
            weighted.fold(0.0, f64::max)
        } else {
            weighted.map(|w| w.powf(r)).sum::<f64>().powf(1.0 / r)
        };
        self.low + high
    }

    /// Last weighted block over the largest one: small values indicate the
    /// vanishing tail that distinguishes `r = ∞−` from `r = ∞`.
    pub fn tail_ratio(&self, s: f64) -> f64 {
        let w: Vec<f64> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| 2f64.powf(s * (i + 1) as f64) * b)
            .collect();
        let max = w.iter().cloned().fold(0.0, f64::max);
        match w.last() {
            Some(&last) if max > 0.0 => last / max,
            _ => 0.0,
        }
    }
}

/// Builds the decomposition for a periodic grid.
pub fn build_lp_family(grid: &SpectralGrid) -> Result<LPFamily> {
    grid.require_kind(GridKind::PeriodicBox, "build_lp_family")?;
    if let Some(&n) = grid.points().iter().find(|&&n| n < MIN_LP_POINTS) {
        return Err(invalid(
            "grid",
            format!("{n} points per axis cannot hold a full annulus (need {MIN_LP_POINTS})"),
        ));
    }
    let max_xi = grid.max_frequency();
    let k_max = max_xi.log2().ceil().max(1.0) as i32;
    let mut xi_abs = vec![0.0; grid.total_points()];
    for_each_frequency(grid, |p, xi| {
        xi_abs[p] = xi.iter().map(|k| k * k).sum::<f64>().sqrt();
    });
    let low_w = xi_abs.iter().map(|&x| psi(x)).collect();
    let k_floor: Vec<i32> = xi_abs
        .iter()
        .map(|&x| if x > 0.0 { x.log2().floor() as i32 } else { i32::MIN })
        .collect();
    let pair_w = xi_abs
        .iter()
        .zip(&k_floor)
        .map(|(&x, &k)| {
            let w = |k: i32| if (1..=k_max).contains(&k) { phi_k(k, x) } else { 0.0 };
            if x > 0.0 {
                [w(k), w(k + 1)]
            } else {
                [0.0, 0.0]
            }
        })
        .collect();
    Ok(LPFamily {
        grid: grid.clone(),
        k_max,
        xi_abs,
        low_w,
        k_floor,
        pair_w,
    })
}

impl LPFamily {
    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn k_max(&self) -> i32 {
        self.k_max
    }

    /// `|ξ|` at every frequency in FFT ordering.
    pub fn frequencies(&self) -> &[f64] {
        &self.xi_abs
    }

    pub fn block_window(&self, k: i32) -> Vec<f64> {
        self.xi_abs.iter().map(|&x| phi_k(k, x)).collect()
    }

    pub fn low_window(&self) -> Vec<f64> {
        self.xi_abs.iter().map(|&x| psi(x)).collect()
    }

    /// Largest `|ψ + Σ_{k=1}^{k_max} φ_k − 1|` over the sampled frequencies.
    pub fn partition_deviation(&self) -> f64 {
        self.xi_abs
            .iter()
            .map(|&x| {
                let s: f64 = psi(x) + (1..=self.k_max).map(|k| phi_k(k, x)).sum::<f64>();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Maps a field onto the family's grid: periodic fields pass through,
    /// half-space fields are zero-extended onto their doubled box.
    pub fn prepare(&self, f: &Field) -> Result<Field> {
        if f.grid() == &self.grid {
            return Ok(f.clone());
        }
        if f.grid().kind() == GridKind::HalfSpace && f.grid().extended_box()? == self.grid {
            return extend(f, &vec![Parity::Zero; f.components()]);
        }
        Err(LabError::GridMismatch("field does not live on the family's grid".into()))
    }

    /// Block norms of a half-space field reflected with the given parities
    /// instead of zero-extended.
    pub fn block_norms_reflected(&self, f: &Field, parities: &[Parity], q: f64) -> Result<BlockNorms> {
        let e = if f.grid() == &self.grid { f.clone() } else { extend(f, parities)? };
        self.block_norms_from_spectrum(&forward(&e)?, q)
    }

    pub fn block_norms(&self, f: &Field, q: f64) -> Result<BlockNorms> {
        let f = self.prepare(f)?;
        let spec = forward(&f)?;
        self.block_norms_from_spectrum(&spec, q)
    }

    /// Block norms from Fourier coefficients; `q = 2` uses Parseval and never
    /// leaves frequency space.
    pub fn block_norms_from_spectrum(&self, spec: &Field, q: f64) -> Result<BlockNorms> {
        if spec.grid() != &self.grid {
            return Err(LabError::GridMismatch("spectrum does not match the family's grid".into()));
        }
        let n = spec.points();
        if q == 2.0 {
            let scale = self.grid.cell_volume() / n as f64;
            let mut energy = vec![0.0; self.k_max as usize + 1];
            let top = self.k_max as usize;
            for c in 0..spec.components() {
                for (p, v) in spec.component(c).iter().enumerate() {
                    let e = v.norm_sqr();
                    if e == 0.0 {
                        continue;
                    }
                    let w = self.low_w[p];
                    energy[0] += w * w * e;
                    let [a, b] = self.pair_w[p];
                    let k = self.k_floor[p];
                    if a > 0.0 {
                        energy[k as usize] += a * a * e;
                    }
                    if b > 0.0 && ((k + 1) as usize) <= top {
                        energy[(k + 1) as usize] += b * b * e;
                    }
                }
            }
            let mut it = energy.into_iter().map(|e| (e * scale).sqrt());
            let low = it.next().unwrap_or(0.0);
            return Ok(BlockNorms { low, blocks: it.collect() });
        }
        let low = lq_norm(&self.filtered(spec, &self.low_window())?, q);
        let blocks = (1..=self.k_max)
            .map(|k| Ok(lq_norm(&self.filtered(spec, &self.block_window(k))?, q)))
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockNorms { low, blocks })
    }

    fn filtered(&self, spec: &Field, window: &[f64]) -> Result<Field> {
        let mut out = spec.clone();
        for c in 0..spec.components() {
            for (v, w) in out.component_mut(c).iter_mut().zip(window) {
                *v *= *w;
            }
        }
        inverse(&out)
    }

    /// `(ψ*f, [φ_1*f, …, φ_{k_max}*f])`.
    pub fn decompose(&self, f: &Field) -> Result<(Field, Vec<Field>)> {
        let f = self.prepare(f)?;
        let spec = forward(&f)?;
        let low = self.filtered(&spec, &self.low_window())?;
        let blocks = (1..=self.k_max)
            .map(|k| self.filtered(&spec, &self.block_window(k)))
            .collect::<Result<Vec<_>>>()?;
        Ok((low, blocks))
    }
}

/// Discrete `B^s_{q,r}` norm.
pub fn besov_norm(f: &Field, p: &BesovParams, lp: &LPFamily) -> Result<f64> {
    Ok(lp.block_norms(f, p.q)?.besov(p.s, p.r))
}

/// Outcome of one product-estimate probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductReport {
    pub product_norm: f64,
    pub u_norm: f64,
    /// `‖v‖_{B^{N/q}_{q,∞}} + ‖v‖_∞`.
    pub v_factor: f64,
    pub ratio: f64,
}

/// `‖uv‖_{B^s_{q,r}} / (‖u‖_{B^s_{q,r}}·(‖v‖_{B^{N/q}_{q,∞}} + ‖v‖_∞))`.
pub fn check_product_estimate(u: &Field, v: &Field, p: &BesovParams, lp: &LPFamily) -> Result<ProductReport> {
    let n = lp.grid().dim() as f64;
    if !(n - 1.0 < p.q && p.q < 2.0 * n) {
        return Err(LabError::ExponentWindow(format!(
            "N - 1 < q < 2N violated: q = {}, N = {n}",
            p.q
        )));
    }
    if !(-1.0 + n / p.q <= p.s) {
        return Err(LabError::ExponentWindow(format!(
            "-1 + N/q <= s violated: s = {} < {}",
            p.s,
            -1.0 + n / p.q
        )));
    }
    if !(p.s < 1.0 / p.q) {
        return Err(LabError::ExponentWindow(format!("s < 1/q violated: s = {} >= {}", p.s, 1.0 / p.q)));
    }
    if v.components() != 1 {
        return Err(invalid("v", "multiplier field must be scalar"));
    }
    let uv = u.mul_scalar_field(v)?;
    let product_norm = besov_norm(&uv, p, lp)?;
    let u_norm = besov_norm(u, p, lp)?;
    let v_besov = lp.block_norms(v, p.q)?.besov(n / p.q, f64::INFINITY);
    let v_factor = v_besov + v.max_abs();
    let denom = u_norm * v_factor;
    let ratio = if denom > 0.0 { product_norm / denom } else { 0.0 };
    Ok(ProductReport {
        product_norm,
        u_norm,
        v_factor,
        ratio,
    })
}

/// Gaussian `exp(−|x − c|²/(2w²))` on a grid, handy for probes.
pub fn gaussian(grid: &SpectralGrid, center: &[f64], width: f64) -> Field {
    Field::scalar_fn(grid, |x| {
        let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
        Complex64::new((-r2 / (2.0 * width * width)).exp(), 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::norms::l2_norm;
    use std::f64::consts::PI;

    fn grid2() -> SpectralGrid {
        SpectralGrid::periodic(&[2.0 * PI, 2.0 * PI], &[32, 32]).unwrap()
    }

    #[test]
    fn partition_of_unity() {
        let lp = build_lp_family(&grid2()).unwrap();
        assert!(lp.partition_deviation() < 1e-12);
    }

    #[test]
    fn window_support() {
        for k in 0..6 {
            assert_eq!(phi_k(k, 4.0 * 2f64.powi(k)), 0.0);
            assert_eq!(phi_k(k, 0.5 * 2f64.powi(k)), 0.0);
            for x in [0.3, 0.7, 1.0, 1.9, 2.5, 3.7, 6.0, 11.0, 40.0] {
                assert_eq!(phi_k(k, x) * phi_k(k + 2, x), 0.0);
            }
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let g = SpectralGrid::periodic(&[1.0], &[8]).unwrap();
        assert!(build_lp_family(&g).is_err());
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let g = grid2();
        let lp = build_lp_family(&g).unwrap();
        let p = BesovParams::new(0.3, 2.0, 1.0).unwrap();
        assert_eq!(besov_norm(&Field::zeros(&g, 2), &p, &lp).unwrap(), 0.0);
    }

    #[test]
    fn parseval_path_matches_quadrature() {
        let g = grid2();
        let lp = build_lp_family(&g).unwrap();
        let f = gaussian(&g, &[PI, PI], 0.4);
        let fast = lp.block_norms(&f, 2.0).unwrap();
        let spec = forward(&f).unwrap();
        let slow_low = l2_norm(&lp.filtered(&spec, &lp.low_window()).unwrap());
        assert!((fast.low - slow_low).abs() < 1e-12 * slow_low.max(1.0));
        for k in 1..=lp.k_max() {
            let slow = l2_norm(&lp.filtered(&spec, &lp.block_window(k)).unwrap());
            assert!((fast.blocks[k as usize - 1] - slow).abs() < 1e-10 * slow.max(1e-3));
        }
    }

    #[test]
    fn sigma_window_names_violation() {
        let p = BesovParams::new(0.0, 2.0, 1.0).unwrap();
        let err = p.with_sigma(0.6).unwrap_err().to_string();
        assert!(err.contains("-1 + 1/q < s - sigma"), "{err}");
    }
}
