use super::*;
use crate::models::BetaFamilyModel;
use crate::roots::solve_real_q;

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

fn density(m: &ProcessModel, q: f64, k: usize) -> SupDensity {
    let g = solve_real_q(m, q, 50).unwrap();
    sup_density_expq(m, &g, k).unwrap()
}

#[test]
fn sech_series_matches_closed_form() {
    for &(a, q) in &[(0.25, 1.0), (-0.5, 0.5), (0.0, 4.0)] {
        let d = density(&ProcessModel::sech(a).unwrap(), q, 200);
        for x in [0.1, 0.5, 1.0, 2.0] {
            let (s, c) = (d.density(x), sup_density_closed_sech(a, q, x).unwrap());
            assert!((s - c).abs() <= 1e-6, "a={a} q={q} x={x}: {s} vs {c}");
        }
    }
    // q = 0 with α < 0: η = |α|
    let eta = crate::models::SechPoissonModel::new(-0.5).unwrap().eta(0.0);
    assert!((eta - 0.5).abs() < 1e-14);
    assert!(sup_density_closed_sech(-0.5, 0.0, 1.0).unwrap() > 0.0);
}

#[test]
fn sech_closed_form_leading_exponential() {
    let (a, q) = (0.25, 1.0);
    let eta = crate::models::SechPoissonModel::new(a).unwrap().eta(q);
    let r = sup_density_closed_sech(a, q, 12.0).unwrap() / sup_density_closed_sech(a, q, 11.0).unwrap();
    assert!((r.ln() - (a - eta)).abs() < 1e-12);
}

#[test]
fn sinh_q4_series_density() {
    let mu = 4.0 * PI;
    let d = density(&ProcessModel::sinh(0.0, 0.0, mu).unwrap(), 4.0, 200);
    assert_eq!(d.atom, 0.0);
    for x in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let (s, c) = (d.density(x), sup_density_closed_sinh_q4(mu, x));
        assert!((s - c).abs() <= 1e-6, "x={x}: {s} vs {c}");
    }
}

#[test]
fn normalization() {
    for m in zoo() {
        for q in [0.5, 5.0] {
            let g = solve_real_q(&m, q, 50).unwrap();
            let d = sup_density_auto(&m, &g, 1e-7).unwrap();
            assert!(d.exponents.iter().all(|z| *z < 0.0));
            assert!((d.mass() - 1.0).abs() <= 1e-6, "{m:?} q={q}: mass {} tail {:e}", d.mass(), d.tail_mass);
        }
    }
}

#[test]
fn cdf_and_density_shape() {
    for m in zoo() {
        let d = sup_density_auto(&m, &solve_real_q(&m, 1.0, 50).unwrap(), 1e-7).unwrap();
        assert_eq!(d.cdf(0.0), d.atom);
        assert!((d.cdf(200.0) - 1.0).abs() < 1e-6);
        let mut prev = d.atom;
        for i in 1..=1000 {
            let x = 0.02 * i as f64;
            let (p, c) = (d.density(x), d.cdf(x));
            assert!(p >= -1e-9, "{m:?} x={x}: {p}");
            assert!(c >= prev - 1e-15, "{m:?} x={x}");
            prev = c;
        }
        let h = 1e-4;
        let num = (d.cdf(1.0 + h) - d.cdf(1.0 - h)) / (2.0 * h);
        assert!((num - d.density(1.0)).abs() < 1e-5);
        // log density is asymptotically linear with slope ζ₀⁻
        let slope = (d.density(10.0).ln() - d.density(5.0).ln()) / 5.0;
        assert!((slope - d.exponents[0]).abs() < 1e-3 * d.exponents[0].abs().max(1.0), "{m:?}: {slope} vs {}", d.exponents[0]);
    }
}

#[test]
fn rejects_foreign_grid() {
    let g = solve_real_q(&ProcessModel::sech(0.25).unwrap(), 1.0, 10).unwrap();
    assert!(sup_density_expq(&ProcessModel::sech(0.3).unwrap(), &g, 10).is_err());
}
