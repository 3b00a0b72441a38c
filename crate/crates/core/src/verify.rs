//! Independent checks: finite differences, weak-form residuals and the
//! invariant suite over a scanned profile and a located critical point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::{zeta_eval, CriticalReport, EnergyProfile};
use crate::error::Result;
use crate::grid::Field;
use crate::linalg::add_scaled;
use crate::models::{FunctionalModel, PsiKind};
use crate::spheremax::{random_smooth_field, stationarity, LevelMaxOptions, LevelMaxResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub context: String,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, measured: f64, tolerance: f64, context: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            // NaN fails
            passed: measured <= tolerance,
            measured,
            tolerance,
            context: context.into(),
        }
    }
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

const FD_STEPS: [f64; 2] = [1e-4, 1e-5];

/// Central differences of `Psi` and `Phi` against their directional derivatives.
pub fn fd_check_functional_derivs(model: &FunctionalModel, trials: usize, seed: u64) -> Vec<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let note = match model.psi_kind() {
        PsiKind::Anisotropic { exponents } if exponents.iter().any(|&p| p < 2.0) => {
            "; Psi is only C^1 for exponents below 2"
        }
        _ => "",
    };
    for trial in 0..trials.max(1) {
        let scale_u = rng.gen_range(0.5..2.0);
        let u = random_smooth_field(model.grid(), &mut rng).scaled(scale_u);
        let v = random_smooth_field(model.grid(), &mut rng);
        let checks: [(&str, &dyn Fn(&[f64]) -> f64, f64); 2] = [
            ("psi_dderiv", &|w| model.psi(w), model.psi_dderiv(&u, &v)),
            ("phi_dderiv", &|w| model.phi(w), model.phi_dderiv(&u, &v)),
        ];
        for (name, f, exact) in checks {
            let errs: Vec<f64> = FD_STEPS
                .iter()
                .map(|&eps| {
                    let fd = (f(&add_scaled(&u, eps, &v)) - f(&add_scaled(&u, -eps, &v))) / (2.0 * eps);
                    (fd - exact).abs()
                })
                .collect();
            let measured = errs.iter().cloned().fold(f64::INFINITY, f64::min);
            out.push(CheckReport::new(
                name,
                measured,
                1e-6f64.max(1e-5 * exact.abs()),
                format!(
                    "trial {trial}: value {exact:.12e}, errors at eps 1e-4/1e-5 = {:.3e}/{:.3e}{note}",
                    errs[0], errs[1]
                ),
            ));
        }
    }
    out
}

/// Formula `zeta'` against central differences of fresh `zeta` evaluations.
pub fn fd_check_zeta(
    model: &FunctionalModel,
    profile: &EnergyProfile,
    delta_rel: f64,
    opts: &LevelMaxOptions,
) -> Vec<CheckReport> {
    let s = &profile.samples;
    let mut out = Vec::new();
    for sample in s.iter().skip(1).take(s.len().saturating_sub(2)) {
        let r = sample.r;
        let delta = delta_rel * r;
        let warm = Some(&sample.detail.maximizer);
        let eval = |x: f64| zeta_eval(model, x, opts, warm).map(|(z, _)| z);
        let tol = 1e-4f64.max(1e-3 * sample.dzeta.abs());
        let report = match (eval(r + delta), eval(r - delta)) {
            (Ok(hi), Ok(lo)) => {
                let fd = (hi - lo) / (2.0 * delta);
                CheckReport::new(
                    "fd_zeta",
                    (fd - sample.dzeta).abs(),
                    tol,
                    format!(
                        "r = {r:.6e}: formula {:.10e}, central difference {fd:.10e}",
                        sample.dzeta
                    ),
                )
            }
            (Err(e), _) | (_, Err(e)) => CheckReport::new(
                "fd_zeta",
                f64::INFINITY,
                tol,
                format!("r = {r:.6e}: evaluation failed: {e}"),
            ),
        };
        out.push(report);
    }
    out
}

/// `||Psi'(u) - Phi'(u)||_*` in the model's natural form.
pub fn residual_dual_norm(model: &FunctionalModel, u: &[f64]) -> Result<f64> {
    model.check(u)?;
    model.dual_norm(&add_scaled(&model.psi_grad(u), -1.0, &model.phi_grad(u)))
}

const LEVEL_TOL: f64 = 1e-10;
const MULTIPLIER_TOL: f64 = 1e-8;
const POSITIVITY_TOL: f64 = 1e-12;
const MONOTONE_SLACK: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-12;

fn level_checks(model: &FunctionalModel, d: &LevelMaxResult, opts: &LevelMaxOptions, out: &mut Vec<CheckReport>) {
    let r = d.r;
    let u = &d.maximizer;
    out.push(CheckReport::new(
        "level_exactness",
        (model.psi(u) - d.r).abs(),
        LEVEL_TOL * r.max(1.0),
        format!("r = {r:.6e}"),
    ));
    let psi_u = model.psi_dderiv(u, u);
    let ratio = model.phi_dderiv(u, u) / psi_u;
    out.push(CheckReport::new(
        "multiplier_ratio",
        (d.multiplier - ratio).abs(),
        MULTIPLIER_TOL,
        format!("r = {r:.6e}: multiplier {:.12e}, ratio {ratio:.12e}", d.multiplier),
    ));
    match stationarity(model, u).and_then(|st| {
        let grad_dual = model.dual_norm(&st.grad_phi)?;
        let res = model.dual_norm(&add_scaled(&st.grad_phi, -ratio, &st.grad_psi))?;
        Ok((res, grad_dual))
    }) {
        Ok((res, grad_dual)) => out.push(CheckReport::new(
            "multiplier_identity",
            res,
            opts.tol_stat * (1.0 + grad_dual),
            format!("r = {r:.6e}: ||g_Phi - ratio g_Psi||_* with ||g_Phi||_* = {grad_dual:.6e}"),
        )),
        Err(e) => out.push(CheckReport::new(
            "multiplier_identity",
            f64::INFINITY,
            opts.tol_stat,
            format!("r = {r:.6e}: {e}"),
        )),
    }
    if model.admits_symmetrization() {
        out.push(CheckReport::new(
            "nonnegativity",
            (-u.min()).max(0.0),
            POSITIVITY_TOL,
            format!("r = {r:.6e}: min node value {:.3e}", u.min()),
        ));
    }
}

/// Evaluates the maximizer, profile and critical-point invariants, one report each.
pub fn invariant_suite(
    model: &FunctionalModel,
    profile: &EnergyProfile,
    report: Option<&CriticalReport>,
    opts: &LevelMaxOptions,
) -> Vec<CheckReport> {
    let mut out = Vec::new();
    for s in &profile.samples {
        level_checks(model, &s.detail, opts, &mut out);
        out.push(CheckReport::new(
            "zeta_identity",
            (s.zeta - model.energy(&s.detail.maximizer)).abs(),
            IDENTITY_TOL * s.zeta.abs().max(1.0),
            format!("r = {:.6e}: zeta = J(u_r)", s.r),
        ));
    }
    for w in profile.samples.windows(2) {
        out.push(CheckReport::new(
            "phi_monotone",
            (w[0].phi - w[1].phi).max(0.0),
            MONOTONE_SLACK,
            format!(
                "phi({:.6e}) = {:.12e}, phi({:.6e}) = {:.12e}",
                w[0].r, w[0].phi, w[1].r, w[1].phi
            ),
        ));
    }
    if let Some(rep) = report {
        level_checks(model, &rep.detail, opts, &mut out);
        out.push(CheckReport::new(
            "critical_dzeta",
            rep.dzeta.abs(),
            rep.tol_crit,
            format!("r* = {:.12e}", rep.r_star),
        ));
        out.push(CheckReport::new(
            "gamma_identity",
            (rep.gamma_r - (1.0 - rep.lambda_r)).abs(),
            1e-10,
            "gamma_r = 1 - lambda_r".to_string(),
        ));
        match residual_dual_norm(model, &rep.solution) {
            Ok(res) => out.push(CheckReport::new(
                "critical_residual",
                res,
                rep.tol_res,
                format!("||Psi'(u*) - Phi'(u*)||_*, ||Psi'(u*)||_* = {:.6e}", rep.psi_dual),
            )),
            Err(e) => out.push(CheckReport::new(
                "critical_residual",
                f64::INFINITY,
                rep.tol_res,
                e.to_string(),
            )),
        }
        if let Some(w) = &rep.witness {
            let floor = w.j0.max(w.jw);
            out.push(CheckReport::new(
                "mountain_pass_level",
                floor + 1e-10 - rep.c_star,
                0.0,
                format!("c* = {:.12e}, J(0) = {:.6e}, J(w) = {:.6e}", rep.c_star, w.j0, w.jw),
            ));
        }
    }
    out
}

/// Adds seeded relative noise of size `amplitude` to every node.
pub fn perturb(u: &Field, amplitude: f64, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Field::new(
        u.iter()
            .map(|x| x + amplitude * scale * rng.gen_range(-1.0..1.0))
            .collect(),
    )
}

/// Corrupts every maximizer of a profile; the suite must then fail.
pub fn corrupted_profile(profile: &EnergyProfile, amplitude: f64, seed: u64) -> EnergyProfile {
    let mut out = profile.clone();
    for (k, s) in out.samples.iter_mut().enumerate() {
        s.detail.maximizer = perturb(&s.detail.maximizer, amplitude, seed.wrapping_add(k as u64));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{scan_profile, ScanOptions};
    use crate::grid::GridSpec;
    use crate::models::{make_model, Family, ModelSpec, NonlinearitySpec, PsiSpec, Truncation};

    fn model(family: Family, psi: PsiSpec, grid: GridSpec) -> FunctionalModel {
        make_model(&ModelSpec {
            grid,
            psi,
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

    fn interval(n: usize) -> GridSpec {
        GridSpec::Interval { a: 0.0, b: 1.0, n }
    }

    #[test]
    fn report_passes_iff_within_tolerance() {
        assert!(CheckReport::new("a", 1.0, 1.0, "").passed);
        assert!(!CheckReport::new("a", 1.0 + 1e-15, 1.0, "").passed);
        assert!(!CheckReport::new("a", f64::NAN, 1.0, "").passed);
    }

    #[test]
    fn functional_derivatives_pass() {
        for fam in [Family::Power { p: 4.0 }, Family::LogCos, Family::Linear { lambda: 3.0 }] {
            let m = model(fam, PsiSpec::Semilinear, interval(63));
            let reps = fd_check_functional_derivs(&m, 3, 11);
            assert_eq!(reps.len(), 6);
            assert!(all_passed(&reps), "{reps:#?}");
        }
        let square = GridSpec::Rectangle {
            x0: 0.0,
            x1: 1.0,
            y0: 0.0,
            y1: 1.0,
            nx: 15,
            ny: 15,
        };
        let m = model(
            Family::Power { p: 2.5 },
            PsiSpec::Anisotropic {
                exponents: vec![1.5, 3.0],
            },
            square,
        );
        let reps = fd_check_functional_derivs(&m, 3, 11);
        assert!(all_passed(&reps), "{reps:#?}");
        assert!(reps[0].context.contains("C^1"));
    }

    #[test]
    fn residual_of_zero_vanishes() {
        let m = model(Family::Power { p: 4.0 }, PsiSpec::Semilinear, interval(31));
        assert_eq!(residual_dual_norm(&m, &Field::zeros(31)).unwrap(), 0.0);
        let u = m.grid().sample(|x| 5.0 * x[0] * (1.0 - x[0]));
        assert!(residual_dual_norm(&m, &u).unwrap() > 1e-2);
    }

    #[test]
    fn suite_detects_corruption() {
        let m = model(Family::Power { p: 4.0 }, PsiSpec::Semilinear, interval(63));
        let opts = ScanOptions::default();
        let profile = scan_profile(&m, &[0.5, 1.0, 2.0], &opts).unwrap();
        let clean = invariant_suite(&m, &profile, None, &opts.level);
        assert!(all_passed(&clean), "{clean:#?}");
        let bad = invariant_suite(&m, &corrupted_profile(&profile, 1e-3, 3), None, &opts.level);
        assert!(bad.iter().any(|r| r.name == "multiplier_identity" && !r.passed));
    }
}
