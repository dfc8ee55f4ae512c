//! Boundary kernel operators `∫₀^∞ F'⁻¹[m0·K(x_N+y_N)·F'H(·, y_N)] dy_N`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::roots::{kernel_values, CharacteristicRoots};
use crate::error::{invalid, LabError, Result};
use crate::spectral::transform::{fft_axes, Direction};
use crate::spectral::{Field, GridKind, SpectralGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum KernelKind {
    /// `B e^{−B(x+y)}`
    K1,
    /// `B² M(x+y)`
    K2,
}

/// Relative size of the last-node contribution above which the normal
/// quadrature is declared unconverged.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Tangential frequency vectors `ξ'` in tangential flat order.
pub fn tangential_modes(grid: &SpectralGrid) -> Vec<Vec<f64>> {
    let d = grid.dim();
    let tdim = d - 1;
    let ks: Vec<Vec<f64>> = (0..tdim).map(|a| grid.wavenumbers(a)).collect();
    let count: usize = grid.points()[..tdim].iter().product();
    let mut modes = Vec::with_capacity(count);
    let mut idx = vec![0usize; tdim];
    for t in 0..count {
        let mut rem = t;
        for a in (0..tdim).rev() {
            idx[a] = rem % grid.points()[a];
            rem /= grid.points()[a];
        }
        modes.push((0..tdim).map(|a| ks[a][idx[a]]).collect());
    }
    modes
}

/// Transforms one component along the tangential axes in place.
pub(crate) fn tangential_fft(data: &mut [Complex64], grid: &SpectralGrid, dir: Direction) {
    let axes: Vec<usize> = (0..grid.dim() - 1).collect();
    if !axes.is_empty() {
        fft_axes(data, grid.points(), &axes, dir);
    }
}

/// `out(x_i) = Σ_j w_j K(x_i + y_j) f(y_j)` for one tangential mode, using
/// `e^{−B(x+y)} = e^{−Bx}e^{−By}` and `M(x+y) = e^{−Bx}M(y) + M(x)e^{−Ay}`.
/// Returns the absolute size of the last quadrature term at `x = 0` and
/// the absolute sum of all terms there.
fn kernel_line(
    kind: KernelKind,
    roots: &CharacteristicRoots,
    nodes: &[f64],
    weights: &[f64],
    f: &[Complex64],
    out: &mut [Complex64],
) -> (f64, f64) {
    let kv: Vec<_> = nodes.iter().map(|&y| kernel_values(y, roots)).collect();
    let mut s_b = Complex64::new(0.0, 0.0);
    let mut s_m = Complex64::new(0.0, 0.0);
    let mut s_a = Complex64::new(0.0, 0.0);
    let mut abs_total = 0.0;
    for j in 0..nodes.len() {
        let wf = weights[j] * f[j];
        s_b += kv[j].eb * wf;
        match kind {
            KernelKind::K1 => abs_total += (kv[j].eb * wf).norm(),
            KernelKind::K2 => {
                s_m += kv[j].m * wf;
                s_a += kv[j].ea * wf;
                abs_total += (kv[j].m * wf).norm();
            }
        }
    }
    let last = nodes.len() - 1;
    let lw = weights[last] * f[last];
    let (b, b2) = (roots.b, roots.b * roots.b);
    let tail = match kind {
        KernelKind::K1 => (kv[last].eb * lw).norm(),
        KernelKind::K2 => (kv[last].m * lw).norm(),
    };
    for (i, o) in out.iter_mut().enumerate() {
        *o = match kind {
            KernelKind::K1 => b * kv[i].eb * s_b,
            KernelKind::K2 => b2 * (kv[i].eb * s_m + kv[i].m * s_a),
        };
    }
    (tail, abs_total)
}

fn normal_quadrature(grid: &SpectralGrid) -> (Vec<f64>, Vec<f64>) {
    let d = grid.dim();
    let n = grid.points()[d - 1];
    let nodes = grid.coords(d - 1);
    let weights = (0..n).map(|j| grid.normal_weight(j)).collect();
    (nodes, weights)
}

fn apply_impl(
    kind: KernelKind,
    roots: &dyn Fn(&[f64]) -> Result<CharacteristicRoots>,
    m0: &dyn Fn(&[f64]) -> Complex64,
    h: &Field,
    adjoint: bool,
) -> Result<Field> {
    let grid = h.grid();
    grid.require_kind(GridKind::HalfSpace, "apply_boundary_kernel")?;
    let n = *grid.points().last().expect("non-empty");
    let modes = tangential_modes(grid);
    let (nodes, weights) = normal_quadrature(grid);
    let mode_roots = modes.iter().map(|xi| roots(xi)).collect::<Result<Vec<_>>>()?;
    let symbols: Vec<Complex64> = modes.iter().map(|xi| m0(xi)).collect();
    if let Some(i) = symbols.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(LabError::NonFiniteSymbol {
            frequency: modes[i].clone(),
            value: symbols[i],
        });
    }
    let (fwd, back) = if adjoint {
        (Direction::Inverse, Direction::Forward)
    } else {
        (Direction::Forward, Direction::Inverse)
    };
    let mut out = Field::zeros(grid, h.components());
    let mut tail = 0.0;
    let mut total = 0.0;
    for c in 0..h.components() {
        let mut spec = h.component(c).to_vec();
        tangential_fft(&mut spec, grid, fwd);
        let dst = out.component_mut(c);
        for (t, r) in mode_roots.iter().enumerate() {
            let line = &spec[t * n..(t + 1) * n];
            let (tl, tot) = kernel_line(kind, r, &nodes, &weights, line, &mut dst[t * n..(t + 1) * n]);
            tail += tl * symbols[t].norm();
            total += tot * symbols[t].norm();
            dst[t * n..(t + 1) * n].iter_mut().for_each(|v| *v *= symbols[t]);
        }
        tangential_fft(dst, grid, back);
    }
    if tail > TAIL_TOLERANCE * total {
        let x_max = grid.x_max().unwrap_or(0.0);
        return Err(LabError::QuadratureTail {
            detail: format!("last-node contribution {:.3e} of {:.3e}", tail, total),
            advice: format!("enlarge X_max beyond {x_max}"),
        });
    }
    Ok(out)
}

/// Applies the kernel operator per component. `roots(ξ')` supplies the
/// characteristic roots of each tangential mode and `m0(ξ')` the symbol.
pub fn apply_boundary_kernel(
    kind: KernelKind,
    roots: &dyn Fn(&[f64]) -> Result<CharacteristicRoots>,
    m0: &dyn Fn(&[f64]) -> Complex64,
    h: &Field,
) -> Result<Field> {
    apply_impl(kind, roots, m0, h, false)
}

/// Transpose of [`apply_boundary_kernel`] for the bilinear pairing: the
/// tangential transform pair is exchanged and the kernel, symmetric in
/// `(x, y)`, is reused.
pub fn apply_boundary_kernel_adjoint(
    kind: KernelKind,
    roots: &dyn Fn(&[f64]) -> Result<CharacteristicRoots>,
    m0: &dyn Fn(&[f64]) -> Complex64,
    phi: &Field,
) -> Result<Field> {
    apply_impl(kind, roots, m0, phi, true)
}

/// Checks that a field lives on a half-space grid with the expected components.
pub fn require_half_space(f: &Field, components: usize, what: &str) -> Result<()> {
    f.grid().require_kind(GridKind::HalfSpace, what)?;
    if f.components() != components {
        return Err(invalid("components", format!("{what} expects {components}, got {}", f.components())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn k1_closed_form() {
        let g = SpectralGrid::half_space(&[1.0], &[8], 40.0, 8192).unwrap();
        let h = Field::scalar_fn(&g, |x| c((-x[1]).exp()));
        let roots = |_: &[f64]| CharacteristicRoots::from_values(c(1.0), c(2.0), 1.0, 1.0);
        let out = apply_boundary_kernel(KernelKind::K1, &roots, &|_| c(1.0), &h).unwrap();
        let n = 8192;
        let mut err: f64 = 0.0;
        for j in 0..n {
            let x = g.coordinate(1, j);
            err = err.max((out.values()[j] - c(2.0 / 3.0 * (-2.0 * x).exp())).norm());
        }
        assert!(err < 2e-5, "{err}");
    }

    #[test]
    fn zero_in_zero_out() {
        let g = SpectralGrid::half_space(&[1.0], &[8], 10.0, 64).unwrap();
        let roots = |_: &[f64]| CharacteristicRoots::from_values(c(1.0), c(2.0), 1.0, 1.0);
        let out = apply_boundary_kernel(KernelKind::K2, &roots, &|_| c(1.0), &Field::zeros(&g, 1)).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn short_box_triggers_tail_error() {
        let g = SpectralGrid::half_space(&[1.0], &[8], 2.0, 64).unwrap();
        let h = Field::scalar_fn(&g, |_| c(1.0));
        let roots = |_: &[f64]| CharacteristicRoots::from_values(c(0.5), c(0.5), 1.0, 0.0);
        let err = apply_boundary_kernel(KernelKind::K1, &roots, &|_| c(1.0), &h).unwrap_err();
        assert!(matches!(err, LabError::QuadratureTail { .. }));
    }
}
