use proptest::prelude::*;
use std::f64::consts::PI;
use zeta_core::eigen::first_eigenvalue;
use zeta_core::energy::{geometric_grid, nehari_sample_min, nehari_scale};
use zeta_core::verify::{all_passed, invariant_suite};
use zeta_core::*;

fn interval_model(n: usize, family: Family) -> FunctionalModel {
    make_model(&ModelSpec {
        grid: GridSpec::Interval { a: 0.0, b: 1.0, n },
        psi: PsiSpec::Semilinear,
        nonlinearity: NonlinearitySpec {
            family,
            truncation: Truncation::ZeroBelow,
            coefficient: None,
        },
        alpha: None,
        eta: None,
    })
    .unwrap()
}

/// `max int v+^4` over `|v'|_2 = 1` by the nonlinear power iteration `v <- A^-1 (v+^3)`,
/// with a tridiagonal solve written out here.
fn quartic_constant(n: usize) -> f64 {
    let h = 1.0 / (n + 1) as f64;
    let solve = |rhs: &[f64]| {
        // (1/h) tridiag(-1, 2, -1) x = rhs
        let (mut c, mut d) = (vec![0.0; n], vec![0.0; n]);
        for i in 0..n {
            let m = 2.0 / h - if i > 0 { -1.0 / h * c[i - 1] } else { 0.0 };
            c[i] = -1.0 / h / m;
            d[i] = (rhs[i] + if i > 0 { d[i - 1] / h } else { 0.0 }) / m;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            x[i] = d[i] - if i + 1 < n { c[i] * x[i + 1] } else { 0.0 };
        }
        x
    };
    let energy = |v: &[f64]| {
        let mut s = v[0] * v[0] + v[n - 1] * v[n - 1];
        for i in 1..n {
            s += (v[i] - v[i - 1]).powi(2);
        }
        s / h
    };
    let mut v: Vec<f64> = (1..=n).map(|i| (PI * i as f64 * h).sin()).collect();
    let mut value = 0.0;
    for _ in 0..500 {
        let e = energy(&v).sqrt();
        v.iter_mut().for_each(|x| *x /= e);
        let next: f64 = v.iter().map(|x| h * x.max(0.0).powi(4)).sum();
        if (next - value).abs() <= 1e-15 * next {
            break;
        }
        value = next;
        let rhs: Vec<f64> = v.iter().map(|x| h * x.max(0.0).powi(3)).collect();
        v = solve(&rhs);
    }
    value
}

#[test]
fn linear_half_eigenvalue_has_constant_slope_and_no_critical_point() {
    let n = 255;
    let m0 = interval_model(n, Family::Linear { lambda: 1.0 });
    let lambda1 = first_eigenvalue(m0.grid(), &vec![1.0; n], None).unwrap().lambda1;
    let m = interval_model(n, Family::Linear { lambda: lambda1 / 2.0 });
    let profile = scan_profile(&m, &[0.5, 1.0, 2.0, 4.0], &ScanOptions::default()).unwrap();
    for s in &profile.samples {
        assert!((s.dzeta - 0.5).abs() <= 1e-3, "r = {}: {}", s.r, s.dzeta);
        assert!((s.zeta - 0.5 * s.r).abs() <= 1e-3 * s.r);
    }
    assert!(matches!(
        locate_critical(&m, &profile, &LevelMaxOptions::default(), &CriticalOptions::default()),
        Err(Error::NoBracket)
    ));
    match mountain_pass_solve(
        &m,
        &ScanOptions::default(),
        &CriticalOptions::default(),
        &MountainPassOptions::default(),
    ) {
        Err(Error::Geometry { witness, .. }) => assert_eq!(witness, GeometryWitness::FarLevel),
        other => panic!("expected a far-level geometry failure, got {other:?}"),
    }
    let e1 = first_eigenvalue(m.grid(), &vec![1.0; n], None).unwrap().e1;
    assert!(matches!(nehari_scale(&m, &e1), Err(Error::NoNehariRoot)));
}

#[test]
fn linear_zeta_at_two_is_one() {
    let m = interval_model(255, Family::Linear { lambda: PI * PI / 2.0 });
    let (z, _) = zeta_eval(&m, 2.0, &LevelMaxOptions::default(), None).unwrap();
    assert!((z - 1.0).abs() <= 5e-3, "{z}");
}

#[test]
fn quartic_mountain_pass_matches_power_iteration() {
    let n = 255;
    let big_m = quartic_constant(n);
    let m = interval_model(n, Family::Power { p: 4.0 });
    let r_star = 1.0 / (2.0 * big_m);

    let (z, _) = zeta_eval(&m, r_star, &LevelMaxOptions::default(), None).unwrap();
    assert!((z - 0.25 / big_m).abs() <= 1e-8 * z);

    let profile = scan_profile(
        &m,
        &geometric_grid(0.1 * r_star, 10.0 * r_star, 9),
        &ScanOptions::default(),
    )
    .unwrap();
    let changes = profile
        .samples
        .windows(2)
        .filter(|w| w[0].dzeta.signum() != w[1].dzeta.signum())
        .count();
    assert_eq!(changes, 1);

    let rep = mountain_pass_solve(
        &m,
        &ScanOptions::default(),
        &CriticalOptions::default(),
        &MountainPassOptions::default(),
    )
    .unwrap();
    assert!(
        (rep.r_star - r_star).abs() <= 1e-6 * r_star,
        "{} vs {r_star}",
        rep.r_star
    );
    assert!((rep.c_star - 0.25 / big_m).abs() <= 1e-6 * rep.c_star);
    assert!(rep.residual_dual <= rep.tol_res);
    assert!((rep.gamma_r - (1.0 - rep.lambda_r)).abs() <= 1e-10);
    let w = rep.witness.as_ref().unwrap();
    assert!(rep.c_star > w.j0.max(w.jw));

    let nehari = nehari_sample_min(&m, 16, 3, Some(&rep.solution)).unwrap();
    assert!((nehari.min - rep.c_star).abs() <= 1e-8 * rep.c_star);
    let random_only = nehari_sample_min(&m, 16, 3, None).unwrap();
    assert!(random_only.min >= rep.c_star * (1.0 - 1e-9));
}

#[test]
fn quartic_nehari_scale_has_closed_form() {
    let n = 127;
    let m = interval_model(n, Family::Power { p: 4.0 });
    let g = m.grid();
    let u = g.sample(|x| x[0] * (1.0 - x[0]) * (1.0 + x[0]));
    let u = u.scaled((1.0 / (2.0 * m.psi(&u))).sqrt());
    let q: f64 = g.quad_weights().iter().zip(u.iter()).map(|(w, x)| w * x.powi(4)).sum();
    let t = nehari_scale(&m, &u).unwrap();
    assert!((t - (1.0 / q).sqrt()).abs() <= 1e-10 * t);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn nehari_point_is_scale_invariant(c in 0.05f64..20.0, k in 1usize..4) {
        let m = interval_model(63, Family::Power { p: 3.0 });
        let u = m.grid().sample(|x| (k as f64 * PI * x[0]).sin().abs() + 0.1 * x[0] * (1.0 - x[0]));
        let t = nehari_scale(&m, &u).unwrap();
        let tc = nehari_scale(&m, &u.scaled(c)).unwrap();
        prop_assert!((tc * c - t).abs() <= 1e-8 * t);
    }

    #[test]
    fn scan_invariants_hold(a in 0.05f64..2.0, b in 2.5f64..40.0) {
        let m = interval_model(63, Family::Power { p: 4.0 });
        let opts = ScanOptions::default();
        let profile = scan_profile(&m, &[a, 0.5 * (a + b), b], &opts).unwrap();
        let checks = invariant_suite(&m, &profile, None, &opts.level);
        prop_assert!(all_passed(&checks), "{:?}", checks.iter().find(|c| !c.passed));
    }
}
