use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use zeta_core::eigen::{anisotropic_constants, first_eigenvalue, AnisoOptions};
use zeta_core::grid::h1_inner;
use zeta_core::spheremax::random_smooth_field;
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

#[test]
fn matches_dense_symmetric_eigensolver() {
    let n = 63;
    let h = 1.0 / (n + 1) as f64;
    let beta: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i + 1) as f64 * h * PI).sin()).collect();
    // B^{-1/2} A B^{-1/2} with A the hand-built stencil and B = h beta
    let m = DMatrix::from_fn(n, n, |i, j| {
        let a = match i.abs_diff(j) {
            0 => 2.0 / h,
            1 => -1.0 / h,
            _ => 0.0,
        };
        a / (h * beta[i]).sqrt() / (h * beta[j]).sqrt()
    });
    let dense = SymmetricEigen::new(m).eigenvalues.min();
    let got = first_eigenvalue(&interval(n), &beta, None).unwrap();
    assert!(
        (got.lambda1 - dense).abs() <= 1e-9 * dense,
        "{} vs {dense}",
        got.lambda1
    );
}

#[test]
fn rayleigh_quotients_bound_the_eigenvalue() {
    for grid in [interval(127), square(15)] {
        let beta = vec![1.0; grid.len()];
        let eig = first_eigenvalue(&grid, &beta, None).unwrap();
        let w = grid.quad_weights();
        let mass = |v: &[f64]| v.iter().zip(w).map(|(x, w)| w * x * x).sum::<f64>();
        let at_e1 = h1_inner(&grid, &eig.e1, &eig.e1, None).unwrap() / mass(&eig.e1);
        assert!((at_e1 - eig.lambda1).abs() <= 1e-9 * eig.lambda1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let v = random_smooth_field(&grid, &mut rng);
            let q = h1_inner(&grid, &v, &v, None).unwrap() / mass(&v);
            assert!(q >= eig.lambda1 * (1.0 - 1e-10), "{q} < {}", eig.lambda1);
        }
    }
}

#[test]
fn eigenvalue_error_is_second_order() {
    let err = |n: usize| {
        let g = interval(n);
        (first_eigenvalue(&g, &vec![1.0; n], None).unwrap().lambda1 - PI * PI).abs()
    };
    let (e1, e2, e3) = (err(31), err(63), err(127));
    for ratio in [e1 / e2, e2 / e3] {
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }
}

#[test]
fn quadratic_anisotropic_constant_matches_the_eigenvalue() {
    let g = square(15);
    let lambda = first_eigenvalue(&g, &vec![1.0; g.len()], None).unwrap().lambda1;
    let c = anisotropic_constants(&g, &[2.0, 2.0], &AnisoOptions::default()).unwrap();
    assert!((c.s_hat - lambda).abs() <= 2e-2 * lambda, "{} vs {lambda}", c.s_hat);
}
