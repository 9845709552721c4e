use std::f64::consts::PI;

use num_complex::Complex64;

use super::*;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn kernel(s: &str) -> KernelDistribution {
    s.parse().unwrap()
}

#[test]
fn config_validation() {
    assert!(cfg().validate().is_ok());
    let bad = QuadratureConfig {
        abs_tol: 0.0,
        ..cfg()
    };
    assert!(matches!(bad.validate(), Err(Error::Input(_))));
    let bad = QuadratureConfig {
        max_subdivisions: 0,
        ..cfg()
    };
    assert!(bad.validate().is_err());
}

#[test]
fn cf_must_be_one_at_origin() {
    let r = CharacteristicFunction::new(|w| Complex64::new(2.0 * (-w * w).exp(), 0.0), SymmetryHint::General);
    assert!(matches!(r, Err(Error::Input(_))));
}

#[test]
fn standard_normal_at_zero() {
    let cf = CharacteristicFunction::new(|w| Complex64::new((-0.5 * w * w).exp(), 0.0), SymmetryHint::RealSymmetric)
        .unwrap();
    let d = gil_pelaez_pdf(&cf, 0.0, &cfg()).unwrap();
    assert!((d.value - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-9);
    assert!(!d.clamped);
}

#[test]
fn unit_laplace_at_one() {
    let cf = CharacteristicFunction::new(|w| Complex64::new(1.0 / (1.0 + w * w), 0.0), SymmetryHint::RealSymmetric)
        .unwrap();
    let d = gil_pelaez_pdf(&cf, 1.0, &cfg()).unwrap();
    let want = 0.5 * (-1f64).exp();
    assert!((d.value - want).abs() < 1e-8, "{} vs {want}", d.value);
    assert!((want - 0.183_940).abs() < 1e-6);
}

#[test]
fn defun_peak_by_inversion() {
    let k = kernel("defun:a=1,b=4");
    let cf = CharacteristicFunction::of_kernel(&k);
    assert_eq!(cf.symmetry_hint(), SymmetryHint::RealSymmetric);
    let d = gil_pelaez_pdf(&cf, 0.0, &cfg()).unwrap();
    let want = 1.0 / (3.0 * PI.sqrt());
    assert!((d.value - want).abs() < 1e-8, "{} vs {want}", d.value);
}

#[test]
fn general_hint_matches_real_hint_for_symmetric_law() {
    let f = |w: f64| Complex64::new((-0.5 * w * w).exp(), 0.0);
    let a = CharacteristicFunction::new(f, SymmetryHint::RealSymmetric).unwrap();
    let b = CharacteristicFunction::new(f, SymmetryHint::General).unwrap();
    for y in [-2.0, 0.3, 1.7] {
        let da = gil_pelaez_pdf(&a, y, &cfg()).unwrap().value;
        let db = gil_pelaez_pdf(&b, y, &cfg()).unwrap().value;
        assert!((da - db).abs() < 1e-12);
    }
}

#[test]
fn non_decaying_cf_fails_truncation() {
    // Poisson(1): periodic, never decays
    let k = kernel("poisson:lambda=1");
    let cf = CharacteristicFunction::of_kernel(&k);
    assert!(matches!(gil_pelaez_pdf(&cf, 0.0, &cfg()), Err(Error::Convergence(_))));
}

#[test]
fn negative_overshoot_is_clamped() {
    // Gamma(2, 1) has no mass below zero
    let k = kernel("gamma:r=2,theta=1");
    let cf = CharacteristicFunction::of_kernel(&k);
    for y in [-3.0, -1.0, -0.5] {
        let d = gil_pelaez_pdf(&cf, y, &cfg()).unwrap();
        assert!(d.value >= 0.0);
        assert!(d.raw.abs() < 1e-6);
        assert_eq!(d.clamped, d.raw < 0.0);
    }
}

#[test]
fn inversion_round_trip() {
    for spec in [
        "normal:m=0,var=1",
        "normal:m=1.5,var=0.49",
        "laplace:m=0,sigma=1",
        "laplace:m=-1,sigma=0.5",
        "gamma:r=2,theta=1",
        "gamma:r=3.5,theta=0.5",
    ] {
        let k = kernel(spec);
        let cf = CharacteristicFunction::of_kernel(&k);
        let (m, sd) = (k.mean(), k.variance().sqrt());
        for i in -12..=12 {
            let y = m + 0.5 * i as f64 * sd;
            let got = gil_pelaez_pdf(&cf, y, &cfg()).unwrap().value;
            let want = k.density(y);
            assert!((got - want).abs() < 1e-6, "{spec} y={y}: {got} vs {want}");
        }
    }
}

#[test]
fn removable_singularity_at_origin() {
    // the DE CF is finite and smooth through ω = 0
    let k = kernel("defun:a=0.5,b=1");
    for w in [0.0, 1e-9, 1e-6, 0.99e-4, 1.01e-4] {
        let v = k.cf(w);
        assert!(v.re.is_finite() && v.re <= 1.0 && v.re > 0.99);
    }
}

#[test]
fn numeric_mgf_examples() {
    let v = numeric_mgf(&kernel("exponential:theta=4"), 0.1, &cfg()).unwrap();
    assert!((v - 1.0 / 0.6).abs() < 1e-8);
    let v = numeric_mgf(&kernel("poisson:lambda=1"), 0.0, &cfg()).unwrap();
    assert!((v - 1.0).abs() < 1e-12);
    let v = numeric_mgf(&kernel("uniform:a=0,b=1"), 1.0, &cfg()).unwrap();
    assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-10);
}

#[test]
fn numeric_mgf_detects_divergence() {
    for (spec, s) in [
        ("exponential:theta=1", 1.5),
        ("gamma:r=2,theta=1", 1.0),
        ("pareto1:alpha=2,theta=1", 0.2),
        ("poisson:lambda=1", f64::NAN),
        ("negbin:r=2,p=0.5", 1.0),
        ("laplace:m=0,sigma=1", -1.2),
    ] {
        let r = numeric_mgf(&kernel(spec), s, &cfg());
        assert!(r.is_err(), "{spec} s={s}: {r:?}");
    }
}

/// Every catalog family over a fixed grid of parameters and arguments.
const ORACLE_GRID: &[(&str, &[f64])] = &[
    ("poisson:lambda=0.5", &[-1.0, 0.3, 1.0]),
    ("poisson:lambda=7", &[-0.5, 0.2, 0.5]),
    ("negbin:r=2,p=0.3", &[-1.0, 0.5, 1.0]),
    ("negbin:r=0.7,p=0.6", &[-0.5, 0.2]),
    ("gamma:r=2,theta=1", &[-2.0, 0.25, 0.5]),
    ("gamma:r=0.6,theta=2", &[-1.0, 0.2]),
    ("exponential:theta=4", &[-1.0, 0.1, 0.2]),
    ("weibull:theta=1,tau=2", &[-1.0, 0.5, 2.0]),
    ("weibull:theta=2,tau=0.7", &[-1.0, -0.1, 0.0]),
    ("weibull:theta=1.5,tau=1", &[-0.3, 0.4]),
    ("pareto1:alpha=2.5,theta=1", &[-2.0, -0.3, 0.0]),
    ("pareto1:alpha=0.8,theta=0.5", &[-1.0, -0.05]),
    ("normal:m=1,var=2", &[-1.0, 0.5, 2.0]),
    ("normal-mv:m=3,kappa=0.5", &[-1.0, 0.7]),
    ("laplace:m=0.5,sigma=2", &[-0.4, 0.1, 0.45]),
    ("gumbel:m=0,sigma=1", &[-2.0, 0.3, 0.8]),
    ("gumbel:m=-1,sigma=0.5", &[-1.0, 1.5]),
    ("logarithmic:q=0.4", &[-1.0, 0.5]),
    ("logarithmic:q=0.9", &[-0.5, 0.05]),
    ("discrete-laplace:p=0.5", &[-0.6, 0.3, 0.6]),
    ("uniform:a=1,b=4", &[-1.0, 0.5, 2.0]),
    ("uniform:a=0,b=1", &[1.0]),
    ("defun:a=1,b=4", &[-0.6, 0.3, 0.9]),
    ("defun:a=0,b=1", &[-1.0, 1.5]),
];

#[test]
fn numeric_mgf_agrees_with_closed_forms() {
    for (spec, args) in ORACLE_GRID {
        let k = kernel(spec);
        for &s in *args {
            let closed = k.mgf(s).unwrap();
            let num = numeric_mgf(&k, s, &cfg()).unwrap();
            let diff = (closed - num).abs();
            assert!(
                diff <= 1e-8 || diff <= 1e-8 * closed.abs(),
                "{spec} s={s}: closed {closed} numeric {num}"
            );
        }
    }
}

#[test]
fn numeric_cf_agrees_with_closed_forms() {
    let specs = [
        "poisson:lambda=2",
        "negbin:r=2,p=0.3",
        "gamma:r=2,theta=1",
        "exponential:theta=0.5",
        "weibull:theta=1,tau=1.5",
        "pareto1:alpha=2,theta=1",
        "normal:m=1,var=2",
        "laplace:m=0.5,sigma=2",
        "gumbel:m=0,sigma=1",
        "logarithmic:q=0.4",
        "discrete-laplace:p=0.5",
        "uniform:a=1,b=4",
        "defun:a=1,b=4",
    ];
    for spec in specs {
        let k = kernel(spec);
        for w in [-1.3, 0.4, 2.0] {
            let closed = k.cf(w);
            let num = numeric_cf(&k, w, &cfg()).unwrap();
            assert!((closed - num).norm() < 1e-7, "{spec} ω={w}: {closed} vs {num}");
        }
    }
}
