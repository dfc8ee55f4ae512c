mod common;

use common::{c, stokes_mode};
use resolvent_core::spectral::{Field, SectorParams, SpectralGrid};
use resolvent_core::stokes::StokesResolvent;
use resolvent_core::{Complex64, ModelParams};
use std::f64::consts::PI;

fn mode(x: &[f64], k: &[f64]) -> Complex64 {
    Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1])
}

#[test]
fn single_mode_matches_dense_oracle() {
    let grid = SpectralGrid::periodic(&[2.0 * PI, 2.0 * PI], &[16, 16]).unwrap();
    let (alpha, beta, rho, pp) = (1.0, 0.7, 1.3, 2.0);
    let model = ModelParams::new(alpha, beta, rho, pp).unwrap();
    let solver = StokesResolvent::new(&model, &grid).unwrap();
    let k = [2.0, -3.0];
    let (fh, gh) = (c(0.4), [Complex64::new(0.0, 1.0), c(-0.5)]);
    let f = Field::scalar_fn(&grid, |x| fh * mode(x, &k));
    let g = Field::from_fn(&grid, 2, |x, o| {
        o[0] = gh[0] * mode(x, &k);
        o[1] = gh[1] * mode(x, &k);
    });
    let lam = SectorParams::new(0.2, 1.0).unwrap().polar(40.0, 2.2).unwrap();
    let sol = solver.solve(&lam, &f, &g).unwrap();
    let (r, u) = stokes_mode(lam.lambda(), alpha, beta, rho, pp, &k, fh, &gh);
    let mut err: f64 = 0.0;
    for (p, x) in grid_points(&grid).iter().enumerate() {
        let e = mode(x, &k);
        err = err.max((sol.rho.values()[p] - r * e).norm());
        err = err.max((sol.u.component(0)[p] - u[0] * e).norm());
        err = err.max((sol.u.component(1)[p] - u[1] * e).norm());
    }
    assert!(err < 1e-12, "{err:e}");
}

fn grid_points(grid: &SpectralGrid) -> Vec<Vec<f64>> {
    (0..grid.total_points())
        .map(|p| {
            let mut idx = vec![0; grid.dim()];
            grid.unravel(p, &mut idx);
            (0..grid.dim()).map(|a| grid.coordinate(a, idx[a])).collect()
        })
        .collect()
}

#[test]
fn half_space_residuals_and_trace() {
    let grid = SpectralGrid::half_space(&[2.0 * PI], &[16], 24.0, 2048).unwrap();
    let model = ModelParams::new(1.0, 0.5, 1.0, 1.0).unwrap();
    let solver = StokesResolvent::new(&model, &grid).unwrap();
    let f = Field::scalar_fn(&grid, |x| c(x[0].cos() * (-(x[1] * x[1])).exp()));
    let g = Field::from_fn(&grid, 2, |x, o| {
        let b = (-(x[1] - 2.0).powi(2)).exp();
        o[0] = c(x[0].sin() * b);
        o[1] = c(b);
    });
    let lam = SectorParams::new(0.3, 1.0).unwrap().polar(16.0, 1.5).unwrap();
    let sol = solver.solve(&lam, &f, &g).unwrap();
    assert!(sol.mass_residual < 1e-10, "{}", sol.mass_residual);
    assert!(sol.momentum_residual < 1e-8, "{}", sol.momentum_residual);
    assert!(sol.trace_residual < 1e-8, "{}", sol.trace_residual);
}

#[test]
fn variable_density_residuals() {
    let grid = SpectralGrid::periodic(&[2.0 * PI, 2.0 * PI], &[32, 32]).unwrap();
    let eta = Field::scalar_fn(&grid, |x| c(0.2 * x[0].sin() * x[1].cos()));
    let model = ModelParams::new(1.0, 0.5, 1.0, 1.0).unwrap().with_eta_tilde(eta).unwrap();
    let solver = StokesResolvent::new(&model, &grid).unwrap();
    let f = Field::scalar_fn(&grid, |x| c((x[0] - x[1]).cos()));
    let g = Field::from_fn(&grid, 2, |x, o| {
        o[0] = c((2.0 * x[1]).sin());
        o[1] = c(x[0].cos());
    });
    let lam = SectorParams::new(0.3, 1.0).unwrap().polar(20.0, 0.5).unwrap();
    let sol = solver.solve(&lam, &f, &g).unwrap();
    assert!(sol.mass_residual < 1e-10);
    assert!(sol.momentum_residual < 1e-8, "{}", sol.momentum_residual);
}

#[test]
fn lambda3_is_dyadic_and_contracting() {
    let grid = SpectralGrid::periodic(&[2.0 * PI, 2.0 * PI], &[16, 16]).unwrap();
    let model = ModelParams::new(1.0, 0.0, 1.0, 4.0).unwrap();
    let solver = StokesResolvent::new(&model, &grid).unwrap();
    let probe = Field::from_fn(&grid, 2, |x, o| {
        o[0] = c((x[0] + x[1]).sin());
        o[1] = c((3.0 * x[0]).cos());
    });
    let rep = solver.estimate_lambda3(&[probe], &[0.0, 1.5, -2.5], 0.25, 20).unwrap();
    let last = rep.samples.last().unwrap();
    assert!(last.kappa < 0.5);
    assert!(rep.samples.len() == 1 || rep.samples[rep.samples.len() - 2].kappa >= 0.5);
    assert!((rep.lambda3 / 0.25).log2().fract().abs() < 1e-12);
}
