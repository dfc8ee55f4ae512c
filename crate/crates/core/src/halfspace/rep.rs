//! Exact representation of half-space solver outputs.
//!
//! A solution is the restriction of a trigonometric polynomial on the doubled
//! box plus, per tangential mode, a boundary layer `p·e^{−Bx_N} + q·M(x_N)`.
//! Both parts differentiate exactly: tangential `∂_a` multiplies by `iξ_a`
//! and `∂_N` maps `(p, q) ↦ (−Bp − q, −Aq)` because `M' = −e^{−Bx} − AM`.

use num_complex::Complex64;
use std::sync::Arc;

use super::kernel::{tangential_fft, tangential_modes};
use super::roots::{kernel_values, CharacteristicRoots, KernelValues};
use crate::error::{invalid, LabError, Result};
use crate::spectral::extension::restrict;
use crate::spectral::multiplier::for_each_frequency;
use crate::spectral::transform::{fft_axes, Direction};
use crate::spectral::{Field, SpectralGrid};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Geometry shared by every representation built at one `λ`.
#[derive(Debug)]
pub struct LayerBasis {
    pub grid: SpectralGrid,
    pub ext: SpectralGrid,
    pub modes: Vec<Vec<f64>>,
    pub roots: Vec<CharacteristicRoots>,
    /// `(e^{−Bx_j}, e^{−Ax_j}, M(x_j))` at index `t·n + j`.
    pub values: Vec<KernelValues>,
    pub lambda: Complex64,
}

impl LayerBasis {
    pub fn new(grid: &SpectralGrid, lambda: Complex64, roots: Vec<CharacteristicRoots>) -> Result<Self> {
        let ext = grid.extended_box()?;
        let modes = tangential_modes(grid);
        if roots.len() != modes.len() {
            return Err(invalid("roots", "one root pair per tangential mode required"));
        }
        let xs = grid.coords(grid.dim() - 1);
        let mut values = Vec::with_capacity(roots.len() * xs.len());
        for r in &roots {
            for &x in &xs {
                values.push(kernel_values(x, r));
            }
        }
        Ok(Self {
            grid: grid.clone(),
            ext,
            modes,
            roots,
            values,
            lambda,
        })
    }

    pub fn tangential_count(&self) -> usize {
        self.modes.len()
    }

    pub fn normal_points(&self) -> usize {
        *self.grid.points().last().expect("non-empty")
    }
}

#[derive(Debug, Clone)]
pub struct HalfSpaceRep {
    basis: Arc<LayerBasis>,
    /// Fourier coefficients on the doubled box.
    box_spec: Field,
    /// Layer amplitudes at index `c·T + t` (tangential DFT convention).
    p: Vec<Complex64>,
    q: Vec<Complex64>,
}

impl HalfSpaceRep {
    pub fn new(basis: Arc<LayerBasis>, box_spec: Field, p: Vec<Complex64>, q: Vec<Complex64>) -> Result<Self> {
        let t = basis.tangential_count();
        let c = box_spec.components();
        if box_spec.grid() != &basis.ext || p.len() != c * t || q.len() != c * t {
            return Err(LabError::GridMismatch("inconsistent half-space representation".into()));
        }
        Ok(Self { basis, box_spec, p, q })
    }

    pub fn basis(&self) -> &Arc<LayerBasis> {
        &self.basis
    }

    pub fn components(&self) -> usize {
        self.box_spec.components()
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.basis.grid
    }

    pub fn box_spectrum(&self) -> &Field {
        &self.box_spec
    }

    pub fn layer_p(&self) -> &[Complex64] {
        &self.p
    }

    pub fn layer_q(&self) -> &[Complex64] {
        &self.q
    }

    /// Values of the box part alone on the half-space grid.
    pub fn evaluate_box(&self) -> Result<Field> {
        let mut b = self.box_spec.clone();
        let points = self.basis.ext.points().to_vec();
        let axes: Vec<usize> = (0..points.len()).collect();
        for c in 0..b.components() {
            fft_axes(b.component_mut(c), &points, &axes, Direction::Inverse);
        }
        restrict(&b, &self.basis.grid)
    }

    /// Values of the boundary layer alone on the half-space grid.
    pub fn evaluate_layer(&self) -> Field {
        let basis = &self.basis;
        let n = basis.normal_points();
        let tc = basis.tangential_count();
        let mut out = Field::zeros(&basis.grid, self.components());
        for c in 0..self.components() {
            let dst = out.component_mut(c);
            for t in 0..tc {
                let (p, q) = (self.p[c * tc + t], self.q[c * tc + t]);
                if p == Complex64::new(0.0, 0.0) && q == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let kv = &basis.values[t * n + j];
                    dst[t * n + j] = p * kv.eb + q * kv.m;
                }
            }
            tangential_fft(dst, &basis.grid, Direction::Inverse);
        }
        out
    }

    pub fn evaluate(&self) -> Result<Field> {
        self.evaluate_box()?.add(&self.evaluate_layer())
    }

    /// Exact `∂_axis` of every component.
    pub fn derivative(&self, axis: usize) -> Result<HalfSpaceRep> {
        let d = self.basis.grid.dim();
        if axis >= d {
            return Err(invalid("axis", format!("{axis} out of range")));
        }
        let mut box_spec = self.box_spec.clone();
        let np = box_spec.points();
        let mut sym = vec![Complex64::new(0.0, 0.0); np];
        for_each_frequency(&self.basis.ext, |p, xi| sym[p] = I * xi[axis]);
        for c in 0..box_spec.components() {
            for (v, s) in box_spec.component_mut(c).iter_mut().zip(&sym) {
                *v *= s;
            }
        }
        let tc = self.basis.tangential_count();
        let mut p = self.p.clone();
        let mut q = self.q.clone();
        for c in 0..self.components() {
            for t in 0..tc {
                let i = c * tc + t;
                if axis + 1 == d {
                    let r = &self.basis.roots[t];
                    p[i] = -r.b * self.p[i] - self.q[i];
                    q[i] = -r.a * self.q[i];
                } else {
                    let f = I * self.basis.modes[t][axis];
                    p[i] *= f;
                    q[i] *= f;
                }
            }
        }
        Ok(HalfSpaceRep {
            basis: self.basis.clone(),
            box_spec,
            p,
            q,
        })
    }

    pub fn component(&self, c: usize) -> HalfSpaceRep {
        let tc = self.basis.tangential_count();
        HalfSpaceRep {
            basis: self.basis.clone(),
            box_spec: self.box_spec.extract(c),
            p: self.p[c * tc..(c + 1) * tc].to_vec(),
            q: self.q[c * tc..(c + 1) * tc].to_vec(),
        }
    }

    fn check_compatible(&self, other: &HalfSpaceRep) -> Result<()> {
        if !Arc::ptr_eq(&self.basis, &other.basis) {
            return Err(LabError::GridMismatch("representations built at different lambda".into()));
        }
        Ok(())
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: Complex64, other: &HalfSpaceRep) -> Result<HalfSpaceRep> {
        self.check_compatible(other)?;
        let mut box_spec = self.box_spec.clone();
        box_spec.axpy(a, &other.box_spec)?;
        let p = self.p.iter().zip(&other.p).map(|(x, y)| x + a * y).collect();
        let q = self.q.iter().zip(&other.q).map(|(x, y)| x + a * y).collect();
        Ok(HalfSpaceRep {
            basis: self.basis.clone(),
            box_spec,
            p,
            q,
        })
    }

    pub fn scaled(&self, a: Complex64) -> HalfSpaceRep {
        HalfSpaceRep {
            basis: self.basis.clone(),
            box_spec: self.box_spec.scaled(a),
            p: self.p.iter().map(|v| v * a).collect(),
            q: self.q.iter().map(|v| v * a).collect(),
        }
    }

    pub fn stack(parts: &[HalfSpaceRep]) -> Result<HalfSpaceRep> {
        let first = parts.first().ok_or_else(|| invalid("parts", "empty stack"))?;
        let mut boxes = Vec::new();
        let mut p = Vec::new();
        let mut q = Vec::new();
        for part in parts {
            first.check_compatible(part)?;
            boxes.push(&part.box_spec);
            p.extend_from_slice(&part.p);
            q.extend_from_slice(&part.q);
        }
        Ok(HalfSpaceRep {
            basis: first.basis.clone(),
            box_spec: Field::stack(&boxes)?,
            p,
            q,
        })
    }

    /// Divergence of an N-component representation.
    pub fn divergence(&self) -> Result<HalfSpaceRep> {
        let d = self.basis.grid.dim();
        if self.components() != d {
            return Err(invalid("rep", "divergence expects N components"));
        }
        let mut acc = self.component(0).derivative(0)?;
        for a in 1..d {
            acc = acc.axpy(Complex64::new(1.0, 0.0), &self.component(a).derivative(a)?)?;
        }
        Ok(acc)
    }

    /// Gradient of a scalar representation.
    pub fn gradient(&self) -> Result<HalfSpaceRep> {
        if self.components() != 1 {
            return Err(invalid("rep", "gradient expects a scalar"));
        }
        let parts = (0..self.basis.grid.dim())
            .map(|a| self.derivative(a))
            .collect::<Result<Vec<_>>>()?;
        Self::stack(&parts)
    }

    /// All first derivatives `∂_a u_c`, ordered `a`-major.
    pub fn jacobian(&self) -> Result<HalfSpaceRep> {
        let parts = (0..self.basis.grid.dim())
            .map(|a| self.derivative(a))
            .collect::<Result<Vec<_>>>()?;
        Self::stack(&parts)
    }

    /// `λu − αΔu − β∇div u`.
    pub fn lame_operator(&self, lambda: Complex64, alpha: f64, beta: f64) -> Result<HalfSpaceRep> {
        let d = self.basis.grid.dim();
        let mut lap = self.derivative(0)?.derivative(0)?;
        for a in 1..d {
            lap = lap.axpy(Complex64::new(1.0, 0.0), &self.derivative(a)?.derivative(a)?)?;
        }
        let grad_div = self.divergence()?.gradient()?;
        let out = self.scaled(lambda).axpy(Complex64::new(-alpha, 0.0), &lap)?;
        out.axpy(Complex64::new(-beta, 0.0), &grad_div)
    }
}
