//! Reflections of half-space fields onto the doubled periodic box and back.
//!
//! A half-space grid with `n` normal nodes `x_N = j·h` extends to a box with
//! `2n` nodes on `[-X_max, X_max)`; box index `n + j` is `x_N = j·h`. The far
//! node `x_N = -X_max` has no mirror image and is set to zero, which is
//! harmless because admissible fields have decayed there.

use num_complex::Complex64;

use super::field::Field;
use super::grid::{GridKind, SpectralGrid};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    /// Zero for `x_N < 0`.
    Zero,
}

/// Parities of an N-vector in the half-space: tangential components even,
/// the normal component odd.
pub fn vector_parities(dim: usize) -> Vec<Parity> {
    let mut p = vec![Parity::Even; dim];
    p[dim - 1] = Parity::Odd;
    p
}

/// Extends every component with its parity. Odd components are zeroed on
/// the wall so that the reflection is exactly antisymmetric.
pub fn extend(f: &Field, parities: &[Parity]) -> Result<Field> {
    f.grid().require_kind(GridKind::HalfSpace, "extend")?;
    if parities.len() != f.components() {
        return Err(invalid("parities", "one parity per component required"));
    }
    let grid = f.grid();
    let ext = grid.extended_box()?;
    let n = *grid.points().last().expect("non-empty");
    let lines = grid.total_points() / n;
    let mut out = Field::zeros(&ext, f.components());
    for (c, &par) in parities.iter().enumerate() {
        let src = f.component(c);
        let dst = out.component_mut(c);
        for l in 0..lines {
            let s = &src[l * n..(l + 1) * n];
            let d = &mut dst[l * 2 * n..(l + 1) * 2 * n];
            d[n..].copy_from_slice(s);
            match par {
                Parity::Even => {
                    for j in 1..n {
                        d[n - j] = s[j];
                    }
                }
                Parity::Odd => {
                    d[n] = Complex64::new(0.0, 0.0);
                    for j in 1..n {
                        d[n - j] = -s[j];
                    }
                }
                Parity::Zero => {}
            }
            d[0] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(out)
}

/// Restriction of a box field to `x_N ≥ 0` on the given half-space grid.
pub fn restrict(f: &Field, half: &SpectralGrid) -> Result<Field> {
    half.require_kind(GridKind::HalfSpace, "restrict")?;
    if f.grid() != &half.extended_box()? {
        return Err(crate::error::LabError::GridMismatch(
            "box is not the extension of the target half-space grid".into(),
        ));
    }
    let n = *half.points().last().expect("non-empty");
    let lines = half.total_points() / n;
    let mut out = Field::zeros(half, f.components());
    for c in 0..f.components() {
        let src = f.component(c);
        let dst = out.component_mut(c);
        for l in 0..lines {
            dst[l * n..(l + 1) * n].copy_from_slice(&src[l * 2 * n + n..(l + 1) * 2 * n]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_odd_round_trip() {
        let g = SpectralGrid::half_space(&[1.0], &[8], 4.0, 16).unwrap();
        let f = Field::from_fn(&g, 2, |x, out| {
            out[0] = Complex64::new(x[0] + x[1], 0.0);
            out[1] = Complex64::new(0.0, x[1] * (-x[1]).exp());
        });
        let e = extend(&f, &vector_parities(2)).unwrap();
        let back = restrict(&e, &g).unwrap();
        assert!(back.sub(&f).unwrap().max_abs() < 1e-15);
        // mirror node of x_N = h sits at box index n - 1
        let line = &e.component(1)[..32];
        assert_eq!(line[15], -line[17]);
        let line0 = &e.component(0)[..32];
        assert_eq!(line0[15], line0[17]);
    }
}
