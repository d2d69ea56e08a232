use super::*;
use crate::config::FieldConfig;
use crate::fields::{FourierPolynomial, FourierTerm};
use crate::pressure::decay_value;
use crate::torus::enumerate_periodic_points;

fn small(n: u32, trials: usize) -> ExperimentConfig {
    ExperimentConfig { n, trials, field: FieldConfig { j_max: Some(n + 2), ..Default::default() }, ..Default::default() }
}

/// `(1/2π) ∫₀^{2π} cos(r cos t) dt` by the trapezoid rule, exact to rounding for smooth periodic integrands.
fn j0_quadrature(r: f64) -> f64 {
    let steps = 256;
    (0..steps)
        .map(|i| (r * (2.0 * std::f64::consts::PI * i as f64 / steps as f64).cos()).cos())
        .sum::<f64>()
        / steps as f64
}

#[test]
fn deterministic_roof_gives_unit_trace() {
    let mut cfg = small(5, 100);
    cfg.field.epsilon = 0.0;
    cfg.field.tau0 = Some(vec![]);
    let exp = Experiment::prepare(&cfg).unwrap();
    let a = exp.table().amplitude();
    let samples = exp.run().unwrap();
    for s in &samples {
        assert!((s.raw - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((s.scaled - Complex64::new(a, 0.0)).norm() < 1e-12);
    }
    let report = StatReport::build(&cfg, exp.table(), exp.xi(), &samples).unwrap();
    assert!(report.normality.covariance[0][0] < 1e-24 && report.normality.covariance[1][1] < 1e-24);
}

#[test]
fn zero_epsilon_is_flagged_degenerate() {
    let mut cfg = small(4, 100);
    cfg.field.epsilon = 0.0;
    let (_, report) = run_experiment(&cfg).unwrap();
    assert!(report.normality.degenerate);
    assert!(!report.all_pass());
    assert!(report.normality.ks_re.p_value < 1e-6);
}

#[test]
fn same_seed_same_samples_any_thread_count() {
    let cfg = small(4, 100);
    let a = run_trials(&cfg).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| run_trials(&cfg).unwrap());
    assert_eq!(a, b);
    let other = run_trials(&ExperimentConfig { seed: cfg.seed + 1, ..cfg.clone() }).unwrap();
    assert_ne!(a, other);
}

#[test]
fn trials_use_derived_seeds() {
    let cfg = small(3, 100);
    let samples = run_trials(&cfg).unwrap();
    for (t, s) in samples.iter().enumerate() {
        assert_eq!(s.seed, trial_seed(cfg.seed, t as u64));
    }
}

#[test]
fn report_shape() {
    let cfg = small(5, 128);
    let (samples, report) = run_experiment(&cfg).unwrap();
    assert_eq!(samples.len(), 128);
    assert_eq!(report.cf.len(), 81);
    let c = report.normality.covariance;
    assert_eq!(c[0][1], c[1][0]);
    for v in [report.normality.ks_re.p_value, report.normality.ks_im.p_value] {
        assert!((0.0..=1.0).contains(&v));
    }
    let names: Vec<&str> = report.verdicts.iter().map(|v| v.name.as_str()).collect();
    assert!(names.contains(&"ks_re_p_value") && names.contains(&"max_cf_deviation"));
    let origin = report.cf.iter().find(|r| r.mu == 0.0 && r.nu == 0.0).unwrap();
    assert_eq!(origin.empirical, Complex64::new(1.0, 0.0));
    assert_eq!(origin.bessel, 1.0);
    let csv = samples_csv(&samples);
    assert_eq!(csv.lines().count(), 129);
}

#[test]
fn too_few_trials_rejected_before_work() {
    let cfg = small(4, 10);
    assert_eq!(run_trials(&cfg).unwrap_err(), crate::Error::TooFewSamples { got: 10, min: 100 });
}

#[test]
fn custom_tau0_round_trips_through_config() {
    let term = FourierTerm { wavevector: vec![0, 1], cos: 0.5, sin: 0.0 };
    let cfg = ExperimentConfig {
        field: FieldConfig { tau0: Some(vec![term.clone()]), ..small(3, 100).field },
        ..small(3, 100)
    };
    let exp = Experiment::prepare(&cfg).unwrap();
    assert_eq!(exp.spec().tau0(), &FourierPolynomial::new(vec![term]));
}

#[test]
fn bessel_product_at_origin_and_single_orbit() {
    let t1 = enumerate_periodic_points(&crate::ToralAutomorphism::cat_map(), 1).unwrap();
    assert_eq!(t1.orbits().len(), 1);
    for (mu, nu) in [(0.0, 0.0), (0.3, -0.4), (1.0, 1.0), (2.0, 0.5)] {
        let r: f64 = f64::hypot(mu, nu);
        assert!((bessel_product_prediction(&t1, mu, nu) - j0_quadrature(r)).abs() < 1e-14);
    }
    let t8 = enumerate_periodic_points(&crate::ToralAutomorphism::cat_map(), 8).unwrap();
    assert_eq!(bessel_product_prediction(&t8, 0.0, 0.0), 1.0);
}

#[test]
fn bessel_product_second_order_expansion() {
    let map = crate::ToralAutomorphism::cat_map();
    let (mu, nu) = (1.0, 1.0);
    let r2: f64 = mu * mu + nu * nu;
    for n in 4..=10 {
        let table = enumerate_periodic_points(&map, n).unwrap();
        let v = max_orbit_scale(&table);
        assert!(v <= decay_value(&table) + 1e-15);
        let resid = bessel_product_prediction(&table, mu, nu).ln() + r2 / 4.0;
        // log J₀(x) = -x²/4 - x⁴/64 - ..., and Σ x_O² = r², so the remainder is at most r⁴ v² / 64 to leading order
        assert!(resid <= 0.0 && -resid <= r2 * r2 * v * v / 32.0, "n = {n}: {resid}");
    }
}

#[test]
fn bessel_product_is_nonincreasing_over_orbits() {
    let table = enumerate_periodic_points(&crate::ToralAutomorphism::cat_map(), 7).unwrap();
    let a = table.amplitude();
    let r = 2.0f64.sqrt();
    let mut partial = 1.0f64;
    for o in table.orbits() {
        let x = o.primitive_period() as f64 * a * r / o.weight();
        assert!(x < 2.40);
        let next = partial * j0_quadrature(x);
        assert!(next.abs() <= partial.abs() + 1e-15);
        partial = next;
    }
    assert!((partial - bessel_product_prediction(&table, 1.0, 1.0)).abs() < 1e-12);
}
