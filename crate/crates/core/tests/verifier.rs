use resolvent_core::besov::BesovParams;
use resolvent_core::operators::Domain;
use resolvent_core::spectral::{Field, SpectralGrid};
use resolvent_core::stokes::StokesResolvent;
use resolvent_core::verifier::{
    sector_arguments, verify_generalized_resolvent, verify_sqr_properties, LameFamily, NormKind, StokesFamily, SweepSpec,
};
use resolvent_core::{Complex64, ModelParams};
use std::f64::consts::{FRAC_PI_4, PI};

fn besov() -> BesovParams {
    BesovParams::new(0.0, 2.0, 2.0).unwrap().with_sigma(0.4).unwrap()
}

fn print(rep: &resolvent_core::verifier::SqrReport) {
    for f in &rep.fits {
        println!(
            "{} {:?} arg {:+.3} slope {:+.4} theory {:+.4}",
            rep.label, f.norm_kind, f.lambda_arg, f.fitted_slope, f.theoretical_slope
        );
    }
}

#[test]
fn whole_space_lines_and_controls() {
    let model = ModelParams::lame(1.0, 0.5).unwrap();
    let family = LameFamily::new(&model, Domain::WholeSpace, FRAC_PI_4);
    let spec = SweepSpec::standard(4.0, FRAC_PI_4);
    let rep = verify_sqr_properties(&family, &besov(), &spec).unwrap();
    print(&rep);
    assert!(rep.pass);
    assert!(rep.negative_controls_detected());
    assert!(rep.argument_spread.iter().all(|(_, s)| *s < 0.1));

    let mut shifted = spec.clone();
    shifted.slope_shift = 0.5;
    assert!(!verify_sqr_properties(&family, &besov(), &shifted).unwrap().pass);
}

#[test]
fn whole_space_fit_is_stable_under_densification() {
    let model = ModelParams::lame(1.0, 0.5).unwrap();
    let family = LameFamily::new(&model, Domain::WholeSpace, FRAC_PI_4);
    let mut spec = SweepSpec::standard(4.0, FRAC_PI_4);
    spec.args = vec![0.0, PI - FRAC_PI_4];
    let a = verify_sqr_properties(&family, &besov(), &spec).unwrap();
    spec.per_octave = 2;
    let b = verify_sqr_properties(&family, &besov(), &spec).unwrap();
    for (x, y) in a.fits.iter().zip(&b.fits) {
        assert!((x.fitted_slope - y.fitted_slope).abs() < 0.02, "{x:?} {y:?}");
    }
}

#[test]
fn half_space_lines_reduced_sweep() {
    let model = ModelParams::lame(1.0, 1.0).unwrap();
    let family = LameFamily::new(&model, Domain::HalfSpace, FRAC_PI_4);
    let mut spec = SweepSpec::standard(4.0, FRAC_PI_4);
    spec.doublings = 7;
    spec.args = vec![0.0, PI - FRAC_PI_4];
    let rep = verify_sqr_properties(&family, &besov(), &spec).unwrap();
    print(&rep);
    assert!(rep.pass);
}

#[test]
fn stokes_generalized_lines() {
    let model = ModelParams::new(1.0, 0.5, 1.0, 1.0).unwrap();
    let grid = SpectralGrid::periodic(&[2.0 * PI, 2.0 * PI], &[32, 32]).unwrap();
    let solver = StokesResolvent::new(&model, &grid).unwrap();
    let probes: Vec<Field> = [1.0, 3.0, 8.0]
        .iter()
        .map(|&k| Field::from_fn(&grid, 2, |x, o| {
            o[0] = Complex64::from_polar(1.0, k * x[0]);
            o[1] = Complex64::from_polar(0.5, k * x[1]);
        }))
        .collect();
    let l3 = solver
        .estimate_lambda3(&probes, &sector_arguments(FRAC_PI_4), 0.25, 30)
        .unwrap()
        .lambda3;
    println!("lambda3 = {l3}");
    let family = StokesFamily::new(&model, Domain::WholeSpace, FRAC_PI_4);
    let rep = verify_generalized_resolvent(&family, &besov(), &SweepSpec::standard(l3, FRAC_PI_4)).unwrap();
    print(&rep);
    assert!(rep.pass);
    assert!(rep.fit(NormKind::Density, 0.0).is_some());
}
