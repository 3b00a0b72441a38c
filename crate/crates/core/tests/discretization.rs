use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use zeta_core::grid::{dual_norm, h1_inner, quadrature, riesz_solve};
use zeta_core::{build_grid, Grid, GridSpec};

fn interval(n: usize) -> Grid {
    build_grid(&GridSpec::Interval { a: 0.0, b: 1.0, n }).unwrap()
}

fn square(n: usize) -> Grid {
    build_grid(&GridSpec::Rectangle {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
        nx: n,
        ny: n,
    })
    .unwrap()
}

fn vec_of(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn h1_inner_is_symmetric(u in vec_of(17), v in vec_of(17)) {
        let g = interval(17);
        let a = h1_inner(&g, &u, &v, None).unwrap();
        let b = h1_inner(&g, &v, &u, None).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn h1_norm_is_positive(u in vec_of(49)) {
        prop_assume!(u.iter().any(|x| x.abs() > 1e-6));
        let g = square(7);
        prop_assert!(h1_inner(&g, &u, &u, None).unwrap() > 0.0);
    }

    #[test]
    fn quadrature_is_linear(u in vec_of(25), v in vec_of(25), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g = square(5);
        let w: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = quadrature(&g, &w).unwrap();
        let rhs = a * quadrature(&g, &u).unwrap() + b * quadrature(&g, &v).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn riesz_map_inverts_the_form(g in vec_of(31), seed in 0usize..31) {
        let grid = interval(31);
        let d = riesz_solve(&grid, &g, None).unwrap();
        let mut e = vec![0.0; 31];
        e[seed] = 1.0;
        let lhs = h1_inner(&grid, &d, &e, None).unwrap();
        let scale = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        prop_assert!((lhs - g[seed]).abs() <= 1e-8 * (1.0 + scale));
    }
}

// Assembled from the stencil by hand, independent of the library's operator.
fn dense_stiffness_1d(n: usize) -> DMatrix<f64> {
    let h = 1.0 / (n + 1) as f64;
    DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 2.0 / h,
        1 => -1.0 / h,
        _ => 0.0,
    })
}

fn dense_stiffness_2d(n: usize) -> DMatrix<f64> {
    // int |grad u|^2 with h^2 cell weights: the 5-point stencil times h^2 / h^2
    let t = dense_stiffness_1d(n) * (1.0 / (n + 1) as f64);
    let id = DMatrix::<f64>::identity(n, n);
    t.kronecker(&id) + id.kronecker(&t)
}

#[test]
fn dual_norm_matches_dense_cholesky() {
    let n = 63;
    let grid = interval(n);
    let a = dense_stiffness_1d(n);
    let chol = a.clone().cholesky().unwrap();
    for k in 0..5 {
        let g: Vec<f64> = (0..n)
            .map(|i| ((i * (k + 3)) as f64 * 0.37).sin() + 0.1 * k as f64)
            .collect();
        let gv = DVector::from_vec(g.clone());
        let exact = gv.dot(&chol.solve(&gv)).sqrt();
        let got = dual_norm(&grid, &g, None).unwrap();
        assert!((got - exact).abs() <= 1e-8 * exact, "{got} vs {exact}");
    }
    let u: Vec<f64> = (0..n).map(|i| (i as f64 * 0.1).cos()).collect();
    let uv = DVector::from_vec(u.clone());
    let form = (uv.transpose() * &a * &uv)[(0, 0)];
    assert!((h1_inner(&grid, &u, &u, None).unwrap() - form).abs() <= 1e-10 * form);
}

#[test]
fn square_form_matches_kronecker_stencil() {
    let n = 9;
    let grid = square(n);
    let a = dense_stiffness_2d(n);
    let u: Vec<f64> = (0..n * n).map(|k| ((k * k) as f64 * 0.013).sin()).collect();
    let uv = DVector::from_vec(u.clone());
    let form = (uv.transpose() * &a * &uv)[(0, 0)];
    assert!((h1_inner(&grid, &u, &u, None).unwrap() - form).abs() <= 1e-10 * form);
    let g = u.clone();
    let exact = uv.dot(&a.cholesky().unwrap().solve(&uv)).sqrt();
    assert!((dual_norm(&grid, &g, None).unwrap() - exact).abs() <= 1e-8 * exact);
}

#[test]
fn h1_error_halves_twice_under_refinement() {
    // |u_h|^2 for u = sin(pi x) converges to pi^2 / 2 at second order
    let exact = std::f64::consts::PI.powi(2) / 2.0;
    let err = |n: usize| {
        let g = interval(n);
        let u = g.sample(|x| (std::f64::consts::PI * x[0]).sin());
        (h1_inner(&g, &u, &u, None).unwrap() - exact).abs()
    };
    let (e1, e2, e3) = (err(31), err(63), err(127));
    for ratio in [e1 / e2, e2 / e3] {
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }
}
