use std::f64::consts::PI;

use resolvent_core::fd::{compare_oracle, fd_resolvent, FdField, FdGrid, FdModel, FdSystem, Interpolation, OracleReport};
use resolvent_core::operators::LameSolver;
use resolvent_core::spectral::{Field, SpectralGrid};
use resolvent_core::stokes::StokesResolvent;
use resolvent_core::{Complex64, ModelParams};

const X_SPEC: f64 = 32.0;
const X_FD: f64 = 24.0;

/// Data compatible with the reflections: `f` and tangential `g` even in
/// `x_N`, normal `g` odd.
fn data(x: &[f64], system: FdSystem, out: &mut [Complex64]) {
    let d = x.len();
    let xn = x[d - 1];
    let bump = (-xn * xn / 4.0).exp();
    let tang = if d == 2 { Complex64::new(0.0, x[0]).exp() } else { Complex64::new(1.0, 0.0) };
    let off = match system {
        FdSystem::Lame => 0,
        FdSystem::Stokes => {
            out[0] = tang * bump * 0.5;
            1
        }
    };
    if d == 2 {
        out[off] = tang * bump;
    }
    out[off + d - 1] = tang * xn * bump;
}

fn eta_profile(x: f64) -> f64 {
    0.1 * (-x * x / 4.0).exp()
}

fn model(variable: bool, grid: &SpectralGrid) -> ModelParams {
    let m = ModelParams::new(1.0, 0.5, 1.0, 1.0).unwrap();
    if !variable {
        return m;
    }
    let d = grid.dim();
    let eta = Field::scalar_fn(grid, |x| Complex64::new(eta_profile(x[d - 1]), 0.0));
    m.with_eta_tilde(eta).unwrap()
}

fn spectral(system: FdSystem, dim: usize, lambda: Complex64, variable: bool) -> Field {
    let grid = if dim == 1 {
        SpectralGrid::half_space(&[], &[], X_SPEC, 4096).unwrap()
    } else {
        SpectralGrid::half_space(&[2.0 * PI], &[64], X_SPEC, 4096).unwrap()
    };
    let m = model(variable, &grid);
    let comps = match system {
        FdSystem::Lame => dim,
        FdSystem::Stokes => dim + 1,
    };
    let all = Field::from_fn(&grid, comps, |x, o| data(x, system, o));
    match system {
        FdSystem::Lame => LameSolver::new(&m, &grid).unwrap().solve_repr(lambda, &all).unwrap().evaluate().unwrap(),
        FdSystem::Stokes => {
            let f = all.extract(0);
            let parts: Vec<Field> = (1..=dim).map(|c| all.extract(c)).collect();
            let g = Field::stack(&parts.iter().collect::<Vec<_>>()).unwrap();
            let sol = StokesResolvent::new(&m, &grid).unwrap().solve_at(lambda, &f, &g).unwrap();
            Field::stack(&[&sol.rho, &sol.u]).unwrap()
        }
    }
}

fn fd(system: FdSystem, dim: usize, lambda: Complex64, variable: bool, refine: usize) -> FdField {
    let intervals = 384 * refine;
    let grid = if dim == 1 {
        FdGrid::line(X_FD, intervals).unwrap()
    } else {
        FdGrid::strip(2.0 * PI, 32 * refine, X_FD, intervals).unwrap()
    };
    let m = ModelParams::new(1.0, 0.5, 1.0, 1.0).unwrap().with_bounds(0.5, 2.0).unwrap();
    let profile: &dyn Fn(f64) -> f64 = &eta_profile;
    let fm = FdModel::new(&m, &grid, variable.then_some(profile)).unwrap();
    let comps = match system {
        FdSystem::Lame => dim,
        FdSystem::Stokes => dim + 1,
    };
    let g = FdField::from_fn(&grid, comps, |x, o| data(x, system, o));
    let sol = fd_resolvent(lambda, &g, &fm, system).unwrap();
    assert!(sol.residual < 1e-12, "discrete residual {:e}", sol.residual);
    assert!(sol.far_boundary_estimate < 1e-8);
    sol.field
}

fn sector_sample() -> Vec<Complex64> {
    [0.0, 0.9, -0.9, 1.8, -1.8].iter().map(|&a| Complex64::from_polar(6.0, a)).collect()
}

fn check(system: FdSystem, dim: usize, variable: bool) {
    for lambda in sector_sample() {
        let s = spectral(system, dim, lambda, variable);
        let reports: Vec<OracleReport> = [1, 2]
            .iter()
            .map(|&r| compare_oracle(&s, &fd(system, dim, lambda, variable, r), Interpolation::Subsample).unwrap())
            .collect();
        let ratio = reports[0].sup_relative / reports[1].sup_relative;
        for r in &reports {
            assert!(r.pass, "{system:?} {dim}D λ = {lambda}: {} ≥ {}", r.sup_relative, r.threshold);
        }
        assert!((3.5..=4.5).contains(&ratio), "{system:?} {dim}D λ = {lambda}: ratio {ratio}");
    }
}

#[test]
fn lame_line() {
    check(FdSystem::Lame, 1, false);
}

#[test]
fn lame_strip() {
    check(FdSystem::Lame, 2, false);
}

#[test]
fn stokes_line() {
    check(FdSystem::Stokes, 1, false);
}

#[test]
fn stokes_strip() {
    check(FdSystem::Stokes, 2, false);
}

#[test]
fn variable_density_line() {
    check(FdSystem::Stokes, 1, true);
}

#[test]
fn identical_fields_compare_to_zero() {
    let grid = SpectralGrid::half_space(&[], &[], 8.0, 64).unwrap();
    let f = Field::scalar_fn(&grid, |x| Complex64::new((-x[0]).exp(), 0.0));
    let fd_grid = FdGrid::line(4.0, 32).unwrap();
    let g = FdField::from_fn(&fd_grid, 1, |x, o| o[0] = Complex64::new((-x[0]).exp(), 0.0));
    let r = compare_oracle(&f, &g, Interpolation::Subsample).unwrap();
    assert!(r.sup_relative < 1e-15 && r.pass);
    let lin = compare_oracle(&f, &g, Interpolation::LinearNormal).unwrap();
    assert!(lin.sup_relative < 1e-15);
    let off = FdGrid::line(4.0, 24).unwrap();
    assert!(compare_oracle(&f, &FdField::zeros(&off, 1), Interpolation::Subsample).is_err());
}
