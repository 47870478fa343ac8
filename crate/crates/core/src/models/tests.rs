use super::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

fn zoo() -> Vec<ProcessModel> {
    vec![
        ProcessModel::sech(0.25).unwrap(),
        ProcessModel::sech(-0.5).unwrap(),
        ProcessModel::sinh(0.25, 1.0, -0.1).unwrap(),
        ProcessModel::sinh(0.0, 0.0, 4.0 * PI).unwrap(),
        ProcessModel::sinh(-0.6, 0.3, 0.7).unwrap(),
        BetaFamilyModel::new(1.0, 2.0, 1.5, 0.7, 0.8, 1.3, 1.5, 2.5, 0.5, 0.2).unwrap().into(),
        BetaFamilyModel::new(2.0, 1.0, 1.0, 2.0, 1.0, 0.5, 0.6, 1.2, 0.0, 0.4).unwrap().into(),
        BetaFamilyModel::new(1.0, 1.0, 1.2, 1.1, 2.0, 1.0, 1.0, 2.0, 0.3, -0.1).unwrap().into(),
    ]
}

fn sinh_as_beta(alpha: f64, sigma: f64, mu: f64) -> ProcessModel {
    BetaFamilyModel::new(4.0, 4.0, 1.0 - alpha, 1.0 + alpha, 1.0, 1.0, 2.0, 2.0, sigma, mu)
        .unwrap()
        .into()
}

#[test]
fn trivial_values() {
    let m = ProcessModel::sech(0.25).unwrap();
    assert_eq!(m.psi(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    let m = ProcessModel::sech(0.0).unwrap();
    let v = m.psi(c(1.0, 0.0)).unwrap();
    assert!((v - c(PI - PI / (0.5 * PI).cosh(), 0.0)).norm() < 1e-14);
    for m in zoo() {
        assert_eq!(m.psi(c(0.0, 0.0)).unwrap().norm(), 0.0, "{m:?}");
    }
}

#[test]
fn derivative_at_origin_is_minus_i_mu() {
    let m = ProcessModel::sinh(0.25, 1.0, -0.1).unwrap();
    let d = m.psi_prime(c(0.0, 0.0)).unwrap();
    assert!((d - c(0.0, 0.1)).norm() < 1e-13, "{d}");
}

#[test]
fn sinh_constants() {
    let ProcessModel::SinhSquare(m) = ProcessModel::sinh(0.25, 1.0, -0.1).unwrap() else { unreachable!() };
    let g = 0.25 * PI / (0.25 * PI).tan();
    assert!((m.gamma_c - g).abs() < 1e-15);
    let r = 4.0 * PI * PI * 0.25 + 4.0 * g * (g - 1.0) / 0.25 + 0.1;
    assert!((m.rho_c - r).abs() < 1e-13);
    // the two branches of ρ meet
    let a = ProcessModel::sinh(1.0001e-4, 0.0, 0.0).unwrap();
    let b = ProcessModel::sinh(0.9999e-4, 0.0, 0.0).unwrap();
    let (ProcessModel::SinhSquare(a), ProcessModel::SinhSquare(b)) = (a, b) else { unreachable!() };
    let slope = 8.0 * PI * PI / 3.0;
    assert!((a.rho_c - b.rho_c - slope * 2e-8).abs() < 1e-12);
}

#[test]
fn beta_reduces_to_sinh() {
    for &(a, s, mu) in &[(0.25, 1.0, -0.1), (-0.4, 0.0, 0.3), (0.0, 0.5, 1.0)] {
        let sinh = ProcessModel::sinh(a, s, mu).unwrap();
        let beta = sinh_as_beta(a, s, mu);
        for k in 0..50 {
            let z = c(-12.0 + 0.5 * k as f64, 0.3 * ((k % 7) as f64 - 3.0));
            let (p, q) = (sinh.psi(z).unwrap(), beta.psi(z).unwrap());
            assert!((p - q).norm() <= 1e-10 * (1.0 + p.norm()), "{a} {z}: {p} vs {q}");
        }
    }
}

#[test]
fn lambda_dispatch_is_continuous() {
    let mk = |l2: f64| -> ProcessModel {
        BetaFamilyModel::new(1.0, 2.0, 1.5, 0.7, 0.8, 1.3, 1.5, l2, 0.5, 0.2).unwrap().into()
    };
    for l in [1.0, 2.0] {
        let (lo, mid, hi) = (mk(l - 1e-6), mk(l), mk(l + 1e-6));
        for z in [c(0.7, 0.0), c(-2.0, 0.3), c(5.0, -0.4)] {
            let (a, b, d) = (lo.psi(z).unwrap(), mid.psi(z).unwrap(), hi.psi(z).unwrap());
            assert!((a - b).norm() < 1e-4 && (d - b).norm() < 1e-4, "λ={l} z={z}");
            // mid lies between the two nearby curves
            assert!(((a + d) * 0.5 - b).norm() < 1e-6 * (1.0 + b.norm()), "λ={l} z={z}");
        }
    }
}

#[test]
fn derivative_matches_finite_difference() {
    let h = 1e-5;
    for m in zoo() {
        for k in 0..50 {
            let z = c(-6.0 + 0.25 * k as f64, 0.17 * ((k % 5) as f64 - 2.0));
            let d = m.psi_prime(z).unwrap();
            let fd = (m.psi(z + h).unwrap() - m.psi(z - h).unwrap()) / (2.0 * h);
            assert!((d - fd).norm() <= 1e-6 * (1.0 + d.norm()), "{m:?} {z}: {d} vs {fd}");
        }
    }
}

#[test]
fn large_argument_growth_is_gaussian() {
    let m: ProcessModel = BetaFamilyModel::new(1.0, 2.0, 1.5, 0.7, 0.8, 1.3, 1.5, 2.5, 0.5, 0.2).unwrap().into();
    let z = c(1e3, 0.0);
    let d = m.psi_prime(z).unwrap();
    let fd = (m.psi(z + 1e-3).unwrap() - m.psi(z - 1e-3).unwrap()) / 2e-3;
    assert!((d - fd).norm() < 1e-6 * d.norm());
    assert!(d.re > 0.25 * 1e3);
}

#[test]
fn quadrature_oracle_agrees() {
    let cases = [(ProcessModel::sech(0.25).unwrap(), 1.7), (ProcessModel::sinh(0.25, 1.0, -0.1).unwrap(), 3.0)];
    for (m, z) in cases {
        let a = m.psi(c(z, 0.0)).unwrap();
        let b = psi_lk_quadrature(&m, c(z, 0.0)).unwrap();
        assert!((a - b).norm() < 1e-7, "{m:?}: {a} vs {b}");
    }
    for m in zoo() {
        assert!(psi_lk_quadrature(&m, c(0.0, 0.0)).unwrap().norm() < 1e-9);
        for z in [-2.3, 0.4, 1.1, 6.0] {
            let a = m.psi(c(z, 0.0)).unwrap();
            let b = psi_lk_quadrature(&m, c(z, 0.0)).unwrap();
            assert!((a - b).norm() < 1e-7 * (1.0 + a.norm()), "{m:?} z={z}: {a} vs {b}");
        }
    }
}

#[test]
fn poles_are_rejected() {
    let m = ProcessModel::sinh(0.25, 1.0, -0.1).unwrap();
    assert!(matches!(m.psi(c(0.0, 1.25)), Err(Error::Pole(_))));
    assert!(m.psi(c(0.0, 0.25)).is_ok());
    let m = ProcessModel::sech(0.25).unwrap();
    assert!(matches!(m.psi(c(0.0, 1.25)), Err(Error::Pole(_))));
    let m: ProcessModel = BetaFamilyModel::new(1.0, 2.0, 1.5, 0.7, 0.8, 1.3, 1.5, 2.5, 0.5, 0.2).unwrap().into();
    assert!(matches!(m.psi(c(0.0, 1.3 * 0.7)), Err(Error::Pole(_))));
    assert!(matches!(m.psi(c(0.0, -0.8 * 2.5)), Err(Error::Pole(_))));
}

#[test]
fn invalid_parameters_name_the_range() {
    let e = ProcessModel::sech(1.5).unwrap_err();
    assert!(e.to_string().contains("|alpha| < 1"));
    let e = BetaFamilyModel::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 3.5, 1.0, 0.0, 0.0).unwrap_err();
    assert!(e.to_string().contains("lambda1 in (0,3)"));
}

#[test]
fn mean_and_mirror() {
    for m in zoo() {
        let mm = m.mirror();
        assert!((m.mean() + mm.mean()).abs() < 1e-12);
        for z in [c(0.3, 0.1), c(-2.0, 0.4)] {
            let a = m.psi(z).unwrap();
            let b = mm.psi(-z).unwrap();
            assert!((a - b).norm() < 1e-11 * (1.0 + a.norm()), "{m:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hermitian_and_nonnegative(i in 0usize..8, z in -40.0f64..40.0) {
        let m = zoo()[i];
        let a = m.psi(c(z, 0.0)).unwrap();
        let b = m.psi(c(-z, 0.0)).unwrap();
        prop_assert!((a.conj() - b).norm() <= 1e-12 * (1.0 + a.norm()));
        prop_assert!(a.re >= -1e-12 * (1.0 + a.norm()));
    }
}
