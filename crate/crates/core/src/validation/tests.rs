use super::*;

fn reals(k: usize) -> Vec<Cx> {
    (0..k).map(|i| Cx::new(-3.0 + 6.0 * i as f64 / (k - 1) as f64, 0.0)).collect()
}

#[test]
fn naive_product_basics() {
    let m = ProcessModel::sinh(0.25, 1.0, -0.1).unwrap();
    let g = solve_real_q(&m, 1.0, 50).unwrap();
    assert_eq!(naive_factor_product(&g, FactorSide::Plus, Cx::new(0.0, 0.0), 100).unwrap(), Cx::new(1.0, 0.0));
    let z = Cx::new(1.3, 0.4);
    let fast = FactorProduct::new(&g, FactorSide::Plus).phi(z).unwrap();
    let mut last = f64::INFINITY;
    for n in [1000, 4000, 16000] {
        let d = rel(naive_factor_product(&g, FactorSide::Plus, z, n).unwrap(), fast);
        assert!(d < last, "n={n}: {d:e}");
        last = d;
    }
    assert!(last < 1e-7, "{last:e}");
}

#[test]
fn bisection_matches_grid() {
    for m in [ProcessModel::sech(0.25).unwrap(), ProcessModel::sinh(0.25, 1.0, -0.1).unwrap()] {
        let g = solve_real_q(&m, 1.0, 30).unwrap();
        let b = bisection_roots(&m, 1.0, 30).unwrap();
        for (x, y) in g.values().iter().zip(&b) {
            assert!((x - y).abs() < 1e-10, "{m:?}: {x} vs {y}");
        }
    }
}

#[test]
fn empty_report() {
    let r = consistency_report(&ProcessModel::sech(0.0).unwrap(), &[], &reals(5));
    assert!(r.checks.is_empty() && r.pass);
}

#[test]
fn sech_suite_passes_and_faults_are_flagged() {
    let m = ProcessModel::sech(0.25).unwrap();
    let mut zs = reals(9);
    zs.extend([Cx::new(0.5, 0.5), Cx::new(-1.0, 2.0)]);
    let r = consistency_report(&m, &[0.5, 1.0], &zs);
    assert!(r.pass, "{r:#?}");
    assert!(r.checks.iter().any(|c| c.name == "closed_form_sech"));
    let opt = ReportOptions { perturb: Some((RootId::Pos(1), 1e-3)), ..ReportOptions::default() };
    let bad = consistency_report_with(&m, &[1.0], &zs, &opt);
    assert!(!bad.pass);
    assert!(bad.checks.iter().any(|c| c.name == "factorization" && !c.pass));
}

#[test]
fn sinh_suite_has_omega() {
    let m = ProcessModel::sinh(0.25, 1.0, -0.1).unwrap();
    let r = consistency_report(&m, &[1.0], &reals(7));
    assert!(r.pass, "{r:#?}");
    assert!(r.checks.iter().any(|c| c.name == "omega"));
}
