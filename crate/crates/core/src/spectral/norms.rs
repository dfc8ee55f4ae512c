//! Trapezoid-weighted discrete norms and pairings.

use num_complex::Complex64;

use super::field::Field;
use crate::error::{invalid, Result};

/// `(Σ_c ∫ |f_c|^q)^{1/q}`; `q = ∞` gives the maximum modulus.
pub fn lq_norm(f: &Field, q: f64) -> f64 {
    if q.is_infinite() {
        return f.max_abs();
    }
    let n = f.points();
    let grid = f.grid();
    let mut acc = 0.0;
    for c in 0..f.components() {
        let vals = f.component(c);
        for p in 0..n {
            acc += grid.point_weight(p) * vals[p].norm().powf(q);
        }
    }
    acc.powf(1.0 / q)
}

pub fn l2_norm(f: &Field) -> f64 {
    let n = f.points();
    let grid = f.grid();
    let mut acc = 0.0;
    for c in 0..f.components() {
        for (p, v) in f.component(c).iter().enumerate().take(n) {
            acc += grid.point_weight(p) * v.norm_sqr();
        }
    }
    acc.sqrt()
}

/// Relative L2 distance `‖a − b‖ / ‖b‖` (absolute when `b = 0`).
pub fn relative_l2(a: &Field, b: &Field) -> Result<f64> {
    let diff = l2_norm(&a.sub(b)?);
    let base = l2_norm(b);
    Ok(if base > 0.0 { diff / base } else { diff })
}

/// Bilinear pairing `Σ_c ∫ a_c b_c` (no conjugation).
pub fn pairing(a: &Field, b: &Field) -> Result<Complex64> {
    a.check_shape(b)?;
    let n = a.points();
    let grid = a.grid();
    let mut acc = Complex64::new(0.0, 0.0);
    for c in 0..a.components() {
        let (x, y) = (a.component(c), b.component(c));
        for p in 0..n {
            acc += grid.point_weight(p) * x[p] * y[p];
        }
    }
    Ok(acc)
}

pub fn validate_q(q: f64) -> Result<()> {
    if !(q > 1.0) {
        return Err(invalid("q", format!("{q} must exceed 1")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::SpectralGrid;
    use crate::spectral::transform::forward;
    use std::f64::consts::PI;

    #[test]
    fn parseval_with_documented_constant() {
        let g = SpectralGrid::periodic(&[2.0 * PI, 1.5], &[16, 32]).unwrap();
        let f = Field::scalar_fn(&g, |x| Complex64::new(x[0].sin() + x[1], (3.0 * x[1]).cos()));
        let spec = forward(&f).unwrap();
        let n = g.total_points() as f64;
        let lhs = l2_norm(&f).powi(2);
        let rhs = g.cell_volume() / n * spec.values().iter().map(|v| v.norm_sqr()).sum::<f64>();
        assert!((lhs - rhs).abs() < 1e-12 * lhs);
    }

    #[test]
    fn half_space_weights_halve_the_wall_node() {
        let g = SpectralGrid::half_space(&[1.0], &[8], 1.0, 8).unwrap();
        let one = Field::scalar_fn(&g, |_| Complex64::new(1.0, 0.0));
        let area = lq_norm(&one, 1.5).powf(1.5);
        assert!((area - (1.0 - 0.5 / 8.0)).abs() < 1e-14);
    }
}
