//! Randomized invariants across the modules.

use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;
use wh_core::distributions::{sup_density_auto, SupDensity};
use wh_core::roots::{solve_real_q, RootGrid};
use wh_core::specfun::{digamma, gauss_2f1, log_gamma};
use wh_core::wh_factors::{FactorProduct, FactorSide};
use wh_core::{BetaFamilyModel, Complex64 as Cx, ProcessModel};

fn models() -> Vec<ProcessModel> {
    vec![
        ProcessModel::sech(0.25).unwrap(),
        ProcessModel::sech(-0.5).unwrap(),
        ProcessModel::sinh(0.25, 1.0, -0.1).unwrap(),
        ProcessModel::sinh(-0.6, 0.3, 0.7).unwrap(),
        BetaFamilyModel::new(1.0, 2.0, 1.5, 0.7, 0.8, 1.3, 1.5, 2.5, 0.5, 0.2).unwrap().into(),
        BetaFamilyModel::new(1.0, 1.0, 1.2, 1.1, 2.0, 1.0, 1.0, 2.0, 0.3, -0.1).unwrap().into(),
    ]
}

/// Root grids and densities at q = 1, built once.
fn fixtures() -> &'static Vec<(RootGrid, SupDensity)> {
    static F: OnceLock<Vec<(RootGrid, SupDensity)>> = OnceLock::new();
    F.get_or_init(|| {
        models()
            .iter()
            .map(|m| {
                let g = solve_real_q(m, 1.0, 50).unwrap();
                let d = sup_density_auto(m, &g, 1e-7).unwrap();
                (g, d)
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gamma_reflection(x in 0.01f64..0.99, y in -5.0f64..5.0) {
        let z = Cx::new(x, y);
        let lhs = (log_gamma(z).unwrap() + log_gamma(Cx::new(1.0, 0.0) - z).unwrap()).exp();
        let rhs = Cx::new(PI, 0.0) / (z * PI).sin();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
    }

    #[test]
    fn gamma_recurrence(x in 0.5f64..40.0, y in -30.0f64..30.0) {
        let z = Cx::new(x, y);
        let d = log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap();
        let l = z.ln();
        // compare modulo 2πi, the branch of ln Γ being continuous in z
        let k = ((d - l).im / (2.0 * PI)).round();
        prop_assert!((d - l - Cx::new(0.0, 2.0 * PI * k)).norm() <= 1e-12 * l.norm().max(1.0));
    }

    #[test]
    fn digamma_recurrence(r in 0.1f64..50.0, th in -3.0f64..3.0) {
        let z = Cx::from_polar(r, th);
        let d = digamma(z + 1.0).unwrap() - digamma(z).unwrap() - z.inv();
        prop_assert!(d.norm() <= 1e-12 * (1.0 + z.inv().norm()));
    }

    #[test]
    fn hypergeometric_at_origin(a in -5.0f64..5.0, b in -5.0f64..5.0, c in 0.1f64..5.0) {
        prop_assert_eq!(gauss_2f1(a, b, c, 0.0).unwrap(), 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn psi_vanishes_at_zero(a in -0.95f64..0.95, s in 0.0f64..2.0, mu in -2.0f64..2.0) {
        prop_assert_eq!(ProcessModel::sech(a).unwrap().psi(Cx::new(0.0, 0.0)).unwrap(), Cx::new(0.0, 0.0));
        prop_assert_eq!(ProcessModel::sinh(a, s, mu).unwrap().psi(Cx::new(0.0, 0.0)).unwrap(), Cx::new(0.0, 0.0));
    }

    #[test]
    fn roots_are_simple(i in 0usize..6, q in 0.05f64..20.0) {
        let m = models()[i];
        let g = solve_real_q(&m, q, 20).unwrap();
        for z in g.values() {
            prop_assert!(m.psi_prime(Cx::new(0.0, z)).unwrap().norm() > 1e-8);
        }
    }

    #[test]
    fn factor_is_a_characteristic_function(i in 0usize..6, x in -8.0f64..8.0, y in 0.0f64..3.0) {
        let f = FactorProduct::new(&fixtures()[i].0, FactorSide::Plus);
        let z = Cx::new(x, y);
        prop_assert!(f.phi(z).unwrap().norm() <= 1.0 + 1e-9);
        let (a, b) = (f.phi(Cx::new(x, 0.0)).unwrap(), f.phi(Cx::new(-x, 0.0)).unwrap());
        prop_assert!((a.conj() - b).norm() <= 1e-12);
        prop_assert!((f.phi(Cx::new(0.0, 0.0)).unwrap() - 1.0).norm() <= 1e-12);
    }

    #[test]
    fn density_and_cdf_shape(i in 0usize..6, x in 0.001f64..15.0, dx in 0.0f64..2.0) {
        let d = &fixtures()[i].1;
        prop_assert!(d.density(x) >= -1e-9);
        prop_assert!(d.cdf(x + dx) >= d.cdf(x) - 1e-15);
        prop_assert!(d.cdf(x) <= d.mass() + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn normalized_for_random_q(i in 0usize..6, q in 0.2f64..8.0) {
        let m = models()[i];
        let d = sup_density_auto(&m, &solve_real_q(&m, q, 50).unwrap(), 1e-7).unwrap();
        prop_assert!((d.mass() - 1.0).abs() <= 1e-6, "mass {}", d.mass());
    }
}
