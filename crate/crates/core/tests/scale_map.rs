use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zeta_core::spheremax::{level_scale_derivative, random_smooth_field, scale_to_level, scale_to_level_bracketed};
use zeta_core::*;

fn model(grid: GridSpec, psi: PsiSpec) -> FunctionalModel {
    make_model(&ModelSpec {
        grid,
        psi,
        nonlinearity: NonlinearitySpec {
            family: Family::Power { p: 4.0 },
            truncation: Truncation::ZeroBelow,
            coefficient: None,
        },
        alpha: None,
        eta: None,
    })
    .unwrap()
}

fn models() -> Vec<(&'static str, FunctionalModel)> {
    let sq = GridSpec::Rectangle {
        x0: 0.0,
        x1: 1.0,
        y0: 0.0,
        y1: 1.0,
        nx: 15,
        ny: 15,
    };
    vec![
        (
            "semilinear",
            model(GridSpec::Interval { a: 0.0, b: 1.0, n: 63 }, PsiSpec::Semilinear),
        ),
        (
            "radial",
            model(
                GridSpec::Radial {
                    r_max: 10.0,
                    dim: 3,
                    n: 63,
                },
                PsiSpec::SchrodingerRadial {
                    potential: ScalarFieldSpec::Ratio { k1: 0.5, k2: 1.0 },
                    v0: None,
                    v_inf: None,
                },
            ),
        ),
        (
            "anisotropic",
            model(
                sq,
                PsiSpec::Anisotropic {
                    exponents: vec![1.5, 3.0],
                },
            ),
        ),
    ]
}

#[test]
fn derivative_matches_central_difference() {
    for (name, m) in models() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 0..20 {
            let u = random_smooth_field(m.grid(), &mut rng);
            let r: f64 = 10f64.powf(rng.gen_range(-2.0..2.0));
            let d = 1e-4 * r;
            let fd = (scale_to_level(&m, &u, r + d).unwrap() - scale_to_level(&m, &u, r - d).unwrap()) / (2.0 * d);
            let exact = level_scale_derivative(&m, &u, r).unwrap();
            assert!((fd - exact).abs() <= 1e-5 * exact.abs(), "{name} #{k}: {fd} vs {exact}");
        }
    }
}

#[test]
fn closed_form_and_bracketed_paths_agree() {
    for (name, m) in models() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let u = random_smooth_field(m.grid(), &mut rng);
            let r: f64 = 10f64.powf(rng.gen_range(-3.0..3.0));
            let a = scale_to_level(&m, &u, r).unwrap();
            let b = scale_to_level_bracketed(&m, &u, r).unwrap();
            assert!((a - b).abs() <= 1e-10 * a, "{name}: {a} vs {b}");
            assert!((m.psi(&u.scaled(a)) - r).abs() <= 1e-12 * r.max(1.0));
        }
    }
}

#[test]
fn zero_field_and_bad_levels_are_rejected() {
    let (_, m) = models().remove(0);
    let zero = Field::zeros(m.grid().len());
    assert!(scale_to_level(&m, &zero, 1.0).is_err());
    let u = Field::new(vec![1.0; m.grid().len()]);
    assert!(scale_to_level(&m, &u, 0.0).is_err());
    assert!(scale_to_level_bracketed(&m, &u, -1.0).is_err());
}
