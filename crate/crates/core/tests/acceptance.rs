//! End-to-end acceptance checks. Each test prints one PASS/FAIL line naming
//! the criterion, the number of checks and the tightest one.

mod common;

use std::f64::consts::{FRAC_PI_4, PI};
use std::path::Path;
use std::time::Instant;

use common::{c, stokes_mode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use resolvent_core::besov::{besov_norm, build_lp_family, check_product_estimate, gaussian, BesovParams};
use resolvent_core::campaign::{self, band_limited, CampaignConfig, Check, Outcome};
use resolvent_core::halfspace::HalfSpaceResolvent;
use resolvent_core::operators::{Domain, LameSolver};
use resolvent_core::semigroup::{laplace_invert, laplace_invert_many, max_regularity_quotient, ContourSpec, StokesSemigroup};
use resolvent_core::spectral::norms::{l2_norm, relative_l2};
use resolvent_core::spectral::{Field, SectorParams, SpectralGrid};
use resolvent_core::stokes::{neumann_invert, StokesResolvent};
use resolvent_core::verifier::{
    sector_arguments, verify_generalized_resolvent, verify_sqr_properties, LameFamily, SqrReport, StokesFamily, SweepSpec,
};
use resolvent_core::wholespace::WholeSpaceResolvent;
use resolvent_core::{Complex64, ModelParams};

fn verdict(n: u32, title: &str, checks: &[Check]) {
    let pass = checks.iter().all(|c| c.pass);
    // flags and range checks carry no value/tolerance margin
    let ratio = |c: &Check| if c.value == c.tolerance || c.name.contains(" in [") { 0.0 } else { c.value / c.tolerance };
    let tightest = checks.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b))).expect("at least one check");
    println!(
        "criterion {n:>2} {} {title}: {} checks, tightest {} = {:.3e} (tolerance {:.3e})",
        if pass { "PASS" } else { "FAIL" },
        checks.len(),
        tightest.name,
        tightest.value,
        tightest.tolerance
    );
    for c in checks.iter().filter(|c| !c.pass) {
        println!("    failed: {} = {:.3e} (tolerance {:.3e})", c.name, c.value, c.tolerance);
    }
    assert!(pass, "criterion {n} failed");
}

fn outcome_checks(prefix: &str, o: &Outcome) -> Vec<Check> {
    o.records
        .iter()
        .flat_map(|r| r.checks.iter().map(move |c| Check { name: format!("{prefix} {} {}", r.id, c.name), ..c.clone() }))
        .collect()
}

fn shipped(name: &str) -> CampaignConfig {
    CampaignConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn box2(n: usize) -> SpectralGrid {
    SpectralGrid::periodic(&[2.0 * PI, 2.0 * PI], &[n, n]).unwrap()
}

fn stokes_model() -> ModelParams {
    ModelParams::new(1.0, 0.5, 1.3, 0.8).unwrap()
}

#[test]
fn criterion_01_exact_formulas() {
    let start = Instant::now();
    let mut checks = Vec::new();
    let grid = box2(16);
    let lam = SectorParams::new(FRAC_PI_4, 0.5).unwrap().polar(1.0, 0.0).unwrap();
    let wave = |x: &[f64]| Complex64::new(0.0, x[0]).exp();
    let g = Field::from_fn(&grid, 2, |x, o| o[0] = wave(x));
    let u = WholeSpaceResolvent::with_coefficients(1.0, 1.0, &grid).unwrap().solve(&lam, &g).unwrap();
    let exact = Field::from_fn(&grid, 2, |x, o| o[0] = wave(x) / 3.0);
    checks.push(Check::at_most("Lamé single mode sup error", u.sub(&exact).unwrap().max_abs(), 1e-10));

    let model = stokes_model();
    let solver = StokesResolvent::new(&model, &grid).unwrap();
    let sector = SectorParams::new(FRAC_PI_4, 0.5).unwrap();
    let mut worst: f64 = 0.0;
    for (k, lam) in [([1.0, 2.0], (2.0, 0.3)), ([3.0, -1.0], (8.0, 2.0)), ([0.0, 4.0], (40.0, -2.2))] {
        let lam = sector.polar(lam.0, lam.1).unwrap();
        let e = |x: &[f64]| Complex64::new(0.0, k[0] * x[0] + k[1] * x[1]).exp();
        let (fa, ga) = (c(0.7), [Complex64::new(1.0, -0.5), c(0.3)]);
        let f = Field::scalar_fn(&grid, |x| fa * e(x));
        let g = Field::from_fn(&grid, 2, |x, o| {
            o[0] = ga[0] * e(x);
            o[1] = ga[1] * e(x);
        });
        let sol = solver.solve(&lam, &f, &g).unwrap();
        let (rho, uv) = stokes_mode(lam.lambda(), model.alpha, model.beta, model.rho_star, 0.8, &k, fa, &ga);
        let rho_e = Field::scalar_fn(&grid, |x| rho * e(x));
        let u_e = Field::from_fn(&grid, 2, |x, o| {
            o[0] = uv[0] * e(x);
            o[1] = uv[1] * e(x);
        });
        let scale = rho.norm().max(uv[0].norm()).max(uv[1].norm());
        worst = worst.max(sol.rho.sub(&rho_e).unwrap().max_abs() / scale);
        worst = worst.max(sol.u.sub(&u_e).unwrap().max_abs() / scale);
    }
    checks.push(Check::at_most("Stokes per-mode oracle relative error", worst, 1e-10));
    checks.push(Check::at_most("runtime seconds", start.elapsed().as_secs_f64(), 1.0));
    verdict(1, "exact-formula agreement", &checks);
}

#[test]
fn criterion_02_half_space_correctness() {
    let mut checks = Vec::new();
    let sector = SectorParams::new(FRAC_PI_4, 0.5).unwrap();

    let start = Instant::now();
    let grid = SpectralGrid::half_space(&[2.0 * PI], &[128], 32.0, 128).unwrap();
    let solver = HalfSpaceResolvent::with_coefficients(1.0, 1.0, &grid).unwrap();
    let g = band_limited(&grid, 2, 4, &mut rng(2)).unwrap();
    for arg in [0.0, 1.2, -1.2] {
        let sol = solver.solve(&sector.polar(4.0, arg).unwrap(), &g).unwrap();
        checks.push(Check::at_most(format!("trace / |g| at arg {arg}"), sol.trace, 1e-8));
        checks.push(Check::at_most(format!("interior residual at arg {arg}"), sol.residual, 1e-8));
    }
    checks.push(Check::at_most("128x128 runtime seconds", start.elapsed().as_secs_f64(), 10.0));

    let start = Instant::now();
    let grid = SpectralGrid::half_space(&[2.0 * PI], &[8], 40.0, 16384).unwrap();
    let lam = sector.polar(1.0, 0.0).unwrap();
    let exact = Field::from_fn(&grid, 2, |x, o| o[0] = c(x[0].sin() * x[1] * (-x[1]).exp()));
    let g = Field::from_fn(&grid, 2, |x, o| {
        let e = (-x[1]).exp();
        let (f, f1, f2) = (x[1] * e, (1.0 - x[1]) * e, (x[1] - 2.0) * e);
        let (s, co) = (x[0].sin(), x[0].cos());
        o[0] = lam.lambda() * s * f - s * (f2 - f) + s * f;
        o[1] = c(-co * f1);
    });
    let sol = HalfSpaceResolvent::with_coefficients(1.0, 1.0, &grid).unwrap().solve(&lam, &g).unwrap();
    checks.push(Check::at_most("manufactured solution relative L2", relative_l2(&sol.u, &exact).unwrap(), 1e-6));
    checks.push(Check::at_most("manufactured runtime seconds", start.elapsed().as_secs_f64(), 10.0));

    let start = Instant::now();
    let grid = SpectralGrid::half_space(&[], &[], 40.0, 1 << 16).unwrap();
    let lam = sector.polar(3.0, 0.0).unwrap();
    let g = Field::scalar_fn(&grid, |x| c((-x[0]).exp()));
    let sol = HalfSpaceResolvent::with_coefficients(0.5, 0.5, &grid).unwrap().solve(&lam, &g).unwrap();
    let s3 = 3f64.sqrt();
    let err = sol
        .u
        .values()
        .iter()
        .enumerate()
        .filter(|(j, _)| grid.coordinate(0, *j) <= 10.0)
        .map(|(j, v)| {
            let x = grid.coordinate(0, j);
            (v - c(((-x).exp() - (-s3 * x).exp()) / 2.0)).norm()
        })
        .fold(0.0, f64::max);
    checks.push(Check::at_most("1D exact ODE sup error on [0, 10]", err, 1e-6));
    checks.push(Check::at_most("1D ODE runtime seconds", start.elapsed().as_secs_f64(), 10.0));
    verdict(2, "half-space correctness", &checks);
}

fn oracle_config(system: &str, dim: usize, eta: f64) -> CampaignConfig {
    let (grid, fd) = if dim == 1 {
        ("lengths = []\npoints = []", "")
    } else {
        ("lengths = [6.283185307179586]\npoints = [64]", "fd_tangential_points = 32\n")
    };
    CampaignConfig::from_toml(&format!(
        "name = \"oracle\"\nkind = \"oracle-compare\"\nsystem = \"{system}\"\ndomain = \"half-space\"\n\
         [model]\nalpha = 1.0\nbeta = 0.5\neta_amplitude = {eta}\n\
         [grid]\n{grid}\nx_max = 32.0\nnormal_points = 4096\n\
         [oracle]\ndim = {dim}\nfd_x_max = 24.0\nfd_intervals = 384\n{fd}"
    ))
    .unwrap()
}

#[test]
fn criterion_03_oracle_equivalence() {
    let start = Instant::now();
    let mut checks = Vec::new();
    for system in ["lame", "stokes"] {
        for dim in [1, 2] {
            let o = campaign::run(&oracle_config(system, dim, 0.0)).unwrap();
            assert_eq!(o.records.len(), 5);
            checks.extend(outcome_checks(&format!("{system} {dim}D"), &o));
        }
    }
    checks.push(Check::at_most("runtime seconds", start.elapsed().as_secs_f64(), 120.0));
    verdict(3, "spectral and finite-difference resolvents agree at O(h²)", &checks);
}

fn sqr_checks(label: &str, rep: &SqrReport) -> Vec<Check> {
    let mut checks: Vec<Check> = rep
        .fits
        .iter()
        .map(|f| Check {
            name: format!("{label} {} arg {:+.3} slope deviation", f.norm_kind.label(), f.lambda_arg),
            value: (f.fitted_slope - f.theoretical_slope).abs(),
            tolerance: f.tolerance,
            pass: f.pass,
        })
        .collect();
    for (k, a, ok) in &rep.negative_controls {
        checks.push(Check::flag(format!("{label} {} arg {a:+.3} ±0.5 control detected", k.label()), *ok));
    }
    checks
}

#[test]
fn criterion_04_decay_exponents() {
    let besov = BesovParams::new(0.0, 2.0, 2.0).unwrap().with_sigma(0.4).unwrap();
    let mut checks = Vec::new();
    for (label, domain, beta) in [("whole-space", Domain::WholeSpace, 0.5), ("half-space", Domain::HalfSpace, 1.0)] {
        let start = Instant::now();
        let family = LameFamily::new(&ModelParams::lame(1.0, beta).unwrap(), domain, FRAC_PI_4);
        let rep = verify_sqr_properties(&family, &besov, &SweepSpec::standard(4.0, FRAC_PI_4)).unwrap();
        checks.extend(sqr_checks(label, &rep));
        for (k, s) in &rep.argument_spread {
            checks.push(Check::at_most(format!("{label} {} spread over arguments", k.label()), *s, 0.1));
        }
        checks.push(Check::at_most(format!("{label} runtime seconds"), start.elapsed().as_secs_f64(), 300.0));
    }
    verdict(4, "decay exponents over 12 doublings and 5 arguments", &checks);
}

fn lambda3(model: &ModelParams) -> f64 {
    let grid = box2(32);
    let probes: Vec<Field> = [1.0, 3.0, 8.0]
        .iter()
        .map(|&k| {
            Field::from_fn(&grid, 2, |x, o| {
                o[0] = Complex64::from_polar(1.0, k * x[0]);
                o[1] = Complex64::from_polar(0.5, k * x[1]);
            })
        })
        .collect();
    StokesResolvent::new(model, &grid)
        .unwrap()
        .estimate_lambda3(&probes, &sector_arguments(FRAC_PI_4), 0.25, 30)
        .unwrap()
        .lambda3
}

#[test]
fn criterion_05_generalized_resolvent() {
    let model = ModelParams::new(1.0, 0.5, 1.0, 1.0).unwrap();
    let besov = BesovParams::new(0.0, 2.0, 2.0).unwrap().with_sigma(0.4).unwrap();
    let family = StokesFamily::new(&model, Domain::WholeSpace, FRAC_PI_4);
    let rep = verify_generalized_resolvent(&family, &besov, &SweepSpec::standard(lambda3(&model), FRAC_PI_4)).unwrap();
    let checks: Vec<Check> = rep
        .fits
        .iter()
        .map(|f| Check {
            name: format!("{} arg {:+.3} slope deviation from {}", f.norm_kind.label(), f.lambda_arg, f.theoretical_slope),
            value: (f.fitted_slope - f.theoretical_slope).abs(),
            tolerance: f.tolerance,
            pass: f.pass,
        })
        .collect();
    verdict(5, "generalized resolvent slopes", &checks);
}

#[test]
fn criterion_06_laplace_inversion() {
    let mut checks = Vec::new();
    let grid = box2(16);
    let mode = Field::scalar_fn(&grid, |x| Complex64::new(0.0, x[0]).exp());
    let scalar = |l: Complex64| Ok(mode.scaled(1.0 / (l + 2.0)));
    let contour = ContourSpec::new(1.0, FRAC_PI_4).unwrap();
    let mut err: f64 = 0.0;
    for t in [0.05, 1.0, 3.0] {
        let v = laplace_invert(&scalar, t, &contour).unwrap();
        err = err.max(v.sub(&mode.scaled(c((-2.0 * t).exp()))).unwrap().max_abs());
    }
    checks.push(Check::at_most("scalar e^(-2t) sup error", err, 1e-8));

    let lame = LameSolver::new(&ModelParams::lame(1.0, 1.0).unwrap(), &grid).unwrap();
    let g = band_limited(&grid, 2, 3, &mut rng(6)).unwrap();
    let family = |l: Complex64| lame.solve_repr(l, &g)?.evaluate();
    let neg = laplace_invert_many(&family, &[-0.5, -0.05], &contour).unwrap();
    let causal = neg.iter().map(l2_norm).fold(0.0, f64::max) / l2_norm(&g);
    checks.push(Check::at_most("Lamé |N(t)g|/|g| for t < 0", causal, 1e-6));

    let model = stokes_model();
    let solver = StokesResolvent::new(&model, &grid).unwrap();
    let rho0 = band_limited(&grid, 1, 2, &mut rng(7)).unwrap();
    let u0 = band_limited(&grid, 2, 2, &mut rng(8)).unwrap();
    let sg = StokesSemigroup::new(&solver, contour).unwrap();
    let other = StokesSemigroup::new(&solver, ContourSpec::new(3.0, FRAC_PI_4).unwrap()).unwrap();
    let times = [0.1, 1.0];
    let a = sg.apply(&times, &rho0, &u0).unwrap();
    let b = other.apply(&times, &rho0, &u0).unwrap();
    let gap = a.iter().zip(&b).map(|(x, y)| relative_l2(&y.state, &x.state).unwrap()).fold(0.0, f64::max);
    checks.push(Check::at_most("Stokes gamma independence", gap, 1e-6));

    let neg = sg.apply(&[-0.3], &rho0, &u0).unwrap();
    let data = l2_norm(&rho0) + l2_norm(&u0);
    let causal = (l2_norm(&neg[0].rho()) + l2_norm(&neg[0].u())) / data;
    checks.push(Check::at_most("Stokes |T(t)(f,g)| for t < 0", causal, 1e-6));

    let (s, t) = (0.3, 0.5);
    let whole = sg.apply(&[s + t], &rho0, &u0).unwrap().remove(0);
    let half = sg.apply(&[s], &rho0, &u0).unwrap().remove(0);
    let twice = sg.apply(&[t], &half.rho(), &half.u()).unwrap().remove(0);
    let defect = relative_l2(&twice.rho(), &whole.rho()).unwrap().max(relative_l2(&twice.u(), &whole.u()).unwrap());
    checks.push(Check::at_most("semigroup property T(s+t) = T(t)T(s)", defect, 1e-5));
    verdict(6, "Laplace inversion causality and consistency", &checks);
}

#[test]
fn criterion_07_l1_in_time() {
    let o = campaign::run(&shipped("l1-lame.toml")).unwrap();
    let mut checks = outcome_checks("l1", &o);

    let grid = box2(16);
    let lp = build_lp_family(&grid).unwrap();
    let besov = BesovParams::new(0.0, 2.0, 1.0).unwrap();
    let solver = StokesResolvent::new(&stokes_model(), &grid).unwrap();
    let sg = StokesSemigroup::new(&solver, ContourSpec::new(4.0, FRAC_PI_4).unwrap()).unwrap();
    let mut quotients = Vec::new();
    let mut r = rng(70);
    for _ in 0..10 {
        let rho0 = band_limited(&grid, 1, 3, &mut r).unwrap();
        let u0 = band_limited(&grid, 2, 3, &mut r).unwrap();
        let q = max_regularity_quotient(&sg, &rho0, &u0, &besov, &lp, (-6, 1), 8).unwrap();
        assert!(q.quotient.is_finite() && q.quotient > 0.0);
        quotients.push(q.quotient);
    }
    let mut sorted = quotients.clone();
    sorted.sort_by(f64::total_cmp);
    let median = 0.5 * (sorted[4] + sorted[5]);
    let spread = sorted.iter().map(|q| (q / median).max(median / q)).fold(0.0, f64::max);
    checks.push(Check::at_most("max-regularity quotient spread over 10 data (factor vs median)", spread, 2.0));
    verdict(7, "L1-in-time finiteness and envelopes", &checks);
}

#[test]
fn criterion_08_neumann_series() {
    let mut checks = Vec::new();
    let model = ModelParams::new(1.0, 0.5, 1.0, 1.0).unwrap();
    let l3 = lambda3(&model);
    let grid = box2(32);
    let solver = StokesResolvent::new(&model, &grid).unwrap();
    let mut r = rng(80);
    let probes: Vec<Field> = (0..4).map(|_| band_limited(&grid, 2, 8, &mut r).unwrap()).collect();
    let args = sector_arguments(FRAC_PI_4);
    for j in 0..6 {
        let m = l3 * 2f64.powi(j);
        let kappa = solver.contraction_factor(m, &args, &probes).unwrap();
        checks.push(Check::at_most(format!("kappa at |λ| = {m:.3}"), kappa, 0.5));
    }
    let tol = 1e-12;
    for &arg in &args {
        let lambda = Complex64::from_polar(l3, arg);
        let op = |k: &Field| solver.pressure_coupling(lambda, k);
        let rep = neumann_invert(&op, &probes[0], tol, 400).unwrap();
        checks.push(Check::at_most(format!("Neumann residual at arg {arg:+.3}"), rep.residual, 10.0 * tol));
    }

    // variable density on a half-line
    let line = SpectralGrid::half_space(&[], &[], 32.0, 1024).unwrap();
    let eta = Field::scalar_fn(&line, |x| c(0.1 * (-x[0] * x[0] / 4.0).exp()));
    let variable = StokesResolvent::new(&model.clone().with_eta_tilde(eta).unwrap(), &line).unwrap();
    let h = band_limited(&line, 1, 0, &mut r).unwrap();
    for arg in [0.0, 1.8, -1.8] {
        let lambda = Complex64::from_polar(6.0, arg);
        let op = |k: &Field| variable.pressure_coupling(lambda, k);
        let rep = neumann_invert(&op, &h, tol, 400).unwrap();
        checks.push(Check::at_most(format!("variable-density kappa at arg {arg:+.1}"), rep.kappa, 0.5));
        checks.push(Check::at_most(format!("variable-density Neumann residual at arg {arg:+.1}"), rep.residual, 10.0 * tol));
    }
    let o = campaign::run(&oracle_config("stokes", 1, 0.1)).unwrap();
    checks.extend(outcome_checks("variable-density FD", &o));
    verdict(8, "Neumann-series machinery", &checks);
}

#[test]
fn criterion_09_besov_infrastructure() {
    let mut checks = Vec::new();
    for grid in [SpectralGrid::periodic(&[2.0 * PI], &[64]).unwrap(), box2(64), box2(128)] {
        let lp = build_lp_family(&grid).unwrap();
        checks.push(Check::at_most(format!("partition deviation {:?}", grid.points()), lp.partition_deviation(), 1e-12));
    }

    let grid = box2(64);
    let lp = build_lp_family(&grid).unwrap();
    let mut r = rng(90);
    let fields: Vec<Field> = (0..10).map(|_| band_limited(&grid, 1, 12, &mut r).unwrap()).collect();
    let params = [
        BesovParams::new(0.0, 2.0, 2.0).unwrap(),
        BesovParams::new(0.3, 2.0, 1.0).unwrap(),
        BesovParams::new(-0.2, 3.0, f64::INFINITY).unwrap(),
    ];
    let mut triangle: f64 = 0.0;
    let mut homogeneity: f64 = 0.0;
    for p in &params {
        for pair in fields.windows(2) {
            let (f, g) = (&pair[0], &pair[1]);
            let (nf, ng) = (besov_norm(f, p, &lp).unwrap(), besov_norm(g, p, &lp).unwrap());
            let nfg = besov_norm(&f.add(g).unwrap(), p, &lp).unwrap();
            triangle = triangle.max((nfg - nf - ng) / (nf + ng));
            let a = Complex64::new(-1.7, 0.4);
            let na = besov_norm(&f.scaled(a), p, &lp).unwrap();
            homogeneity = homogeneity.max((na - a.norm() * nf).abs() / (a.norm() * nf));
        }
    }
    let zero = besov_norm(&Field::zeros(&grid, 1), &params[0], &lp).unwrap();
    checks.push(Check::at_most("triangle inequality excess", triangle.max(0.0), 1e-10));
    checks.push(Check::at_most("homogeneity defect", homogeneity, 1e-10));
    checks.push(Check::at_most("norm of zero", zero, 1e-10));

    let mut equiv: f64 = 0.0;
    for f in &fields {
        let (b, l) = (besov_norm(f, &params[0], &lp).unwrap(), l2_norm(f));
        equiv = equiv.max(b / l).max(l / b);
    }
    checks.push(Check::at_most("B^0_{2,2} against L2 constant", equiv, 4.0));

    let p = BesovParams::new(0.25, 2.0, 2.0).unwrap();
    for (w_u, w_v) in [(0.5, 0.8), (0.7, 0.4), (0.3, 1.0)] {
        let mut ratios = Vec::new();
        for n in [32, 64, 128] {
            let grid = box2(n);
            let lp = build_lp_family(&grid).unwrap();
            let u = gaussian(&grid, &[PI, PI], w_u);
            let v = gaussian(&grid, &[PI - 0.3, PI + 0.2], w_v).map(|z| z + 0.5);
            ratios.push(check_product_estimate(&u, &v, &p, &lp).unwrap().ratio);
        }
        let mut s = ratios.clone();
        s.sort_by(f64::total_cmp);
        let spread = ratios.iter().map(|r| (r / s[1]).max(s[1] / r)).fold(0.0, f64::max);
        checks.push(Check::at_most(format!("product ratio spread under refinement ({w_u}, {w_v})"), spread, 2.0));
    }
    verdict(9, "Besov infrastructure", &checks);
}

fn record_bytes(o: &Outcome) -> Vec<Vec<u8>> {
    o.records.iter().map(|r| serde_json::to_vec(r).unwrap()).collect()
}

#[test]
fn criterion_10_determinism() {
    let mut checks = Vec::new();
    for name in ["duhamel-stokes.toml", "solve-halfspace.toml", "l1-lame.toml"] {
        let config = shipped(name);
        let a = campaign::run_with_workers(&config, 1).unwrap();
        let b = campaign::run_with_workers(&config, 2).unwrap();
        let c = campaign::run_with_workers(&config, 1).unwrap();
        let same = record_bytes(&a) == record_bytes(&b) && record_bytes(&a) == record_bytes(&c);
        checks.push(Check::flag(format!("{name} records byte-identical across runs and worker counts"), same));

        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        let m0 = campaign::write_artifacts(dirs[0].path(), &config, &a, 1, 0.0).unwrap();
        campaign::write_artifacts(dirs[1].path(), &config, &b, 2, 0.0).unwrap();
        let files_equal = m0
            .files
            .iter()
            .all(|f| std::fs::read(dirs[0].path().join(f)).unwrap() == std::fs::read(dirs[1].path().join(f)).unwrap());
        checks.push(Check::flag(format!("{name} artifact files byte-identical"), files_equal));
    }
    verdict(10, "seeded campaigns are deterministic", &checks);
}
