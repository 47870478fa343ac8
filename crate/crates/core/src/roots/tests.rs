use super::*;
use crate::models::BetaFamilyModel;
use std::f64::consts::PI;

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

#[test]
fn roots_sit_in_their_intervals() {
    for m in zoo() {
        for q in [0.3, 2.0, 50.0] {
            let g = solve_real_q(&m, q, 40).unwrap();
            for ((iv, z), r) in g.intervals.iter().zip(g.values()).zip(&g.residuals) {
                assert!(iv.contains(z), "{m:?} q={q} {}: {z} not in ({}, {})", iv.id, iv.lo, iv.hi);
                assert!(*r <= 1e-10 * (1.0 + q), "{m:?} q={q} {}: residual {r}", iv.id);
                let psi = m.psi(Cx::new(0.0, z)).unwrap();
                assert!((q + psi).norm() <= 1e-8 * (1.0 + q + psi.norm()), "{m:?} {}", iv.id);
            }
        }
    }
}

#[test]
fn zero_discount_root() {
    let m = ProcessModel::sinh(0.25, 1.0, -0.1).unwrap();
    assert!(m.mean() < 0.0);
    let g = solve_real_q(&m, 0.0, 5).unwrap();
    assert_eq!(g.zeta0_plus, 0.0);
    assert!(g.zeta0_minus < 0.0);
    assert!(solve_real_q(&m.mirror(), 0.0, 5).is_err());
}

#[test]
fn sech_roots_are_closed_form() {
    let ProcessModel::SechPoisson(s) = ProcessModel::sech(0.25).unwrap() else { unreachable!() };
    let m = ProcessModel::SechPoisson(s);
    let q = 1.3;
    let eta = s.eta(q);
    let g = solve_real_q(&m, q, 20).unwrap();
    assert!((g.zeta0_plus - (0.25 + eta)).abs() < 1e-14);
    assert!((g.zeta0_minus - (0.25 - eta)).abs() < 1e-14);
    for k in 1..=10 {
        let kf = k as f64;
        assert!((g.zeta_pos[2 * k - 2] - (0.25 + 4.0 * kf - eta)).abs() < 1e-13);
        assert!((g.zeta_pos[2 * k - 1] - (0.25 + 4.0 * kf + eta)).abs() < 1e-13);
        assert!((g.zeta_neg[2 * k - 2] - (0.25 - 4.0 * kf + eta)).abs() < 1e-13);
    }
}

#[test]
fn sinh_series_leading_terms() {
    let ProcessModel::SinhSquare(s) = ProcessModel::sinh(0.25, 1.0, -0.1).unwrap() else { unreachable!() };
    let e = asymptotics::expansion(&ProcessModel::SinhSquare(s), Cx::new(0.7, 0.0)).unwrap();
    let t = &e.strands[0].terms;
    assert!((t[0].1.re - 8.0).abs() < 1e-13);
    let a2 = -8.0 * (2.0 * s.rho_c + s.alpha);
    assert!((t[1].1.re - a2).abs() < 1e-12, "{} vs {a2}", t[1].1);

    let ProcessModel::SinhSquare(s) = ProcessModel::sinh(0.1, 0.0, 3.0).unwrap() else { unreachable!() };
    let q = 0.7;
    let e = asymptotics::expansion(&ProcessModel::SinhSquare(s), Cx::new(q, 0.0)).unwrap();
    let c0 = -4.0 * (4.0 * s.gamma_c - q + s.alpha * s.rho_c) / (16.0 * PI * PI + s.rho_c * s.rho_c);
    assert!((e.strands[0].terms[0].1.re - c0).abs() < 1e-13);
}

#[test]
fn expansions_converge() {
    let cases = [
        ProcessModel::sinh(0.25, 1.0, -0.1).unwrap(),
        ProcessModel::sinh(0.1, 0.0, 3.0).unwrap(),
        ProcessModel::sinh(-0.3, 0.0, -2.0).unwrap(),
        ProcessModel::sech(0.25).unwrap(),
    ];
    for m in cases {
        for &n in &[1000i64, 4000] {
            let a = asymptotic_root(&m, 0.7, n).unwrap();
            let g = solve_real_q(&m, 0.7, n as usize).unwrap();
            let z = g.zeta_pos[n as usize - 1];
            let nf = n as f64;
            assert!((a - z).abs() <= 1e-9 * nf, "{m:?} n={n}: {a} vs {z}");
        }
    }
}

#[test]
fn beta_seeds_land_near_roots() {
    for m in zoo().into_iter().filter(|m| matches!(m, ProcessModel::BetaFamily(_))) {
        let g = solve_real_q(&m, 1.0, 2000).unwrap();
        let Ok(e) = asymptotics::expansion(&m, Cx::new(1.0, 0.0)) else { continue };
        let ProcessModel::BetaFamily(b) = m else { unreachable!() };
        for n in [1000usize, 2000] {
            let z = g.zeta_pos[n - 1];
            let a = e.root(n as i64).unwrap().re;
            let lead = (a - b.beta2 * (e.strands[0].b + n as f64)).abs();
            assert!((a - z).abs() < 0.3 * lead.max(1e-3), "{m:?} n={n}: {a} vs {z}");
        }
    }
}

#[test]
fn second_order_coefficient_fits_roots() {
    // the fit is independent of the series machinery
    for &(a, s, mu) in &[(0.25, 0.5, -0.1), (-0.3, 1.7, 0.4)] {
        let m = ProcessModel::sinh(a, s, mu).unwrap();
        let ProcessModel::SinhSquare(p) = m else { unreachable!() };
        let g = solve_real_q(&m, 1.0, 8000).unwrap();
        let (s2, v0) = (s * s, 8.0 / (s * s));
        let fit = |n: usize| {
            let y = n as f64 + a;
            (g.zeta_pos[n - 1] - y - v0 / y) * y * y
        };
        // Richardson in 1/y removes the next order
        let (f1, f2) = (fit(4000), fit(8000));
        let (y1, y2) = (4000.0 + a, 8000.0 + a);
        let est = (f2 * y2 - f1 * y1) / (y2 - y1);
        let predicted = -(8.0 / s2) * (2.0 * p.rho_c / s2 + a);
        assert!((est - predicted).abs() < 1e-3 * predicted.abs(), "{est} vs {predicted}");
        let e = asymptotics::expansion(&m, Cx::new(1.0, 0.0)).unwrap();
        assert!((e.strands[0].terms[1].1.re - predicted).abs() < 1e-10 * predicted.abs());
    }
}

#[test]
fn remainder_is_third_order() {
    let m = ProcessModel::sinh(0.25, 1.0, -0.1).unwrap();
    let g = solve_real_q(&m, 1.0, 200).unwrap();
    let mut worst: f64 = 0.0;
    for n in 50..=200 {
        let a = asymptotic_root(&m, 1.0, n as i64).unwrap();
        worst = worst.max((g.zeta_pos[n - 1] - a).abs() * (n as f64).powi(3));
    }
    assert!(worst < 2e4, "{worst}");
}

#[test]
fn omega_sums_agree() {
    let m = ProcessModel::sinh(0.25, 1.0, -0.1).unwrap();
    let rec = omega_recurrence(&m, 1.0, 5).unwrap();
    let frozen = [3.241592653589795, 54.637772498409184, 32.12474997021055, 940.2371943452714, 51.744828771163995, 17071.20174173058];
    let g = solve_real_q(&m, 1.0, 100).unwrap();
    for k in 0..=5 {
        assert!((rec[k] - frozen[k]).abs() < 1e-12 * frozen[k].abs(), "recurrence m={k}: {}", rec[k]);
        let d = omega_direct(&g, &m, k).unwrap();
        assert!((d - rec[k]).abs() < 1e-8 * rec[k].abs(), "m={k}: {d} vs {}", rec[k]);
    }
    assert!(omega_recurrence(&ProcessModel::sinh(0.0, 1.0, -0.1).unwrap(), 1.0, 3).is_err());
}

#[test]
fn continuation_first_order_and_residuals() {
    let m = ProcessModel::sinh(0.25, 1.0, -0.1).unwrap();
    let g = solve_real_q(&m, 1.0, 6).unwrap();
    let ctl = StepControl { du_out: 1e-3, ..StepControl::default() };
    let p = continue_complex_q(&m, &g, 2e-3, &ctl).unwrap();
    assert_eq!(p.paths[p.ids.iter().position(|i| *i == RootId::Pos(3)).unwrap()][0].re, g.get(RootId::Pos(3)));
    for (i, id) in p.ids.iter().enumerate() {
        let z0 = g.get(*id);
        let d = m.psi_prime(Cx::new(0.0, z0)).unwrap();
        let u = p.u_grid[1];
        // dζ/du = −1/Ψ′(iζ)
        let lin = Cx::new(z0, 0.0) - u / d;
        assert!((p.paths[i][1] - lin).norm() < 50.0 * u * u, "{id}: {} vs {lin}", p.paths[i][1]);
        assert!(p.max_residual[i] < 1e-10);
    }
}
