use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use zeta_core::eigen::{anisotropic_constants, first_eigenvalue, AnisoOptions};
use zeta_core::energy::nehari_sample_min;
use zeta_core::models::PsiKind;
use zeta_core::verify::{all_passed, fd_check_functional_derivs, fd_check_zeta, invariant_suite, CheckReport};
use zeta_core::{
    make_model, mountain_pass_with_profile, scan_profile, CriticalReport, EnergyProfile, Error, FunctionalModel,
};

use crate::config::RunConfig;
use crate::output::{write_field, write_json, write_json_lines, write_profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Scan,
    Solve,
    Eig,
    Verify,
}

/// What a command produced. `passed` is false when a performed check failed.
#[derive(Debug)]
pub struct Outcome {
    pub passed: bool,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

pub fn execute(cmd: Command, cfg: &RunConfig, out_dir: &Path) -> Result<Outcome> {
    let model = make_model(&cfg.model)?;
    match cmd {
        Command::Scan => scan(&model, cfg, out_dir).map(|(o, _)| o),
        Command::Solve => solve(&model, cfg, out_dir).map(|(o, _)| o),
        Command::Eig => eig(&model, cfg, out_dir).map(|(o, _)| o),
        Command::Verify => verify(&model, cfg, out_dir).map(|(o, _)| o),
    }
}

fn prepare(out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir).with_context(|| format!("cannot create {}", out_dir.display()))
}

pub fn scan(model: &FunctionalModel, cfg: &RunConfig, out_dir: &Path) -> Result<(Outcome, EnergyProfile)> {
    prepare(out_dir)?;
    let path = out_dir.join("profile.csv");
    match scan_profile(model, &cfg.scan.radii(), &cfg.scan_options()) {
        Ok(profile) => {
            write_profile(&path, &profile)?;
            let summary = format!(
                "scanned {} radii in [{}, {}]",
                profile.len(),
                cfg.scan.r_min,
                cfg.scan.r_max
            );
            Ok((
                Outcome {
                    passed: true,
                    files: vec![path],
                    summary,
                },
                profile,
            ))
        }
        Err(Error::ScanFailed { r, partial, source }) => {
            write_profile(&path, &partial)?;
            Err(Error::ScanFailed { r, partial, source })
                .context(format!("partial profile written to {}", path.display()))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub r_star: f64,
    pub c_star: f64,
    pub gamma_r: f64,
    pub residual_dual: f64,
    pub rho: f64,
    pub alpha: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    #[serde(rename = "J0")]
    pub j0: f64,
    #[serde(rename = "Jw")]
    pub jw: f64,
    pub nehari_min_sampled: f64,
    pub dzeta: f64,
    pub lambda_r: f64,
    pub tol_res: f64,
    pub tol_crit: f64,
    /// Corners of `zeta` met while refining, as `[r, zeta]`.
    pub corners: Vec<[f64; 2]>,
}

pub fn solve(model: &FunctionalModel, cfg: &RunConfig, out_dir: &Path) -> Result<(Outcome, CriticalReport)> {
    prepare(out_dir)?;
    let (mut rep, profile) =
        mountain_pass_with_profile(model, &cfg.scan_options(), &cfg.critical, &cfg.mountain_pass_options())?;
    let nehari = nehari_sample_min(model, cfg.verify.nehari_k, cfg.solver.level.seed, Some(&rep.solution))?;
    rep.nehari_min_sampled = Some(nehari.min);
    let w = rep
        .witness
        .clone()
        .context("mountain-pass driver returned no witnesses")?;
    let report = SolveReport {
        r_star: rep.r_star,
        c_star: rep.c_star,
        gamma_r: rep.gamma_r,
        residual_dual: rep.residual_dual,
        rho: w.rho,
        alpha: w.alpha,
        big_r: w.big_r,
        j0: w.j0,
        jw: w.jw,
        nehari_min_sampled: nehari.min,
        dzeta: rep.dzeta,
        lambda_r: rep.lambda_r,
        tol_res: rep.tol_res,
        tol_crit: rep.tol_crit,
        corners: rep.corners.iter().map(|c| [c.r, c.zeta]).collect(),
    };
    let files = vec![
        out_dir.join("report.json"),
        out_dir.join("solution.csv"),
        out_dir.join("profile.csv"),
    ];
    write_json(&files[0], &report)?;
    write_field(&files[1], model.grid(), &rep.solution)?;
    write_profile(&files[2], &profile)?;
    let passed = rep.residual_dual <= rep.tol_res && rep.dzeta.abs() <= rep.tol_crit && rep.c_star > w.j0.max(w.jw);
    let summary = format!(
        "r* = {:.12e}, c* = {:.12e}, residual {:.3e} (tolerance {:.3e})",
        rep.r_star, rep.c_star, rep.residual_dual, rep.tol_res
    );
    Ok((Outcome { passed, files, summary }, rep))
}

#[derive(Debug, Clone, Serialize)]
pub struct EigReport {
    pub lambda1: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Anisotropic models only: the constants of the `p`-Laplacian energy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_hat: Option<f64>,
}

pub fn eig(model: &FunctionalModel, cfg: &RunConfig, out_dir: &Path) -> Result<(Outcome, EigReport)> {
    prepare(out_dir)?;
    let grid = model.grid();
    let potential = match model.psi_kind() {
        PsiKind::SchrodingerRadial { potential, .. } => Some(potential.as_slice()),
        _ => None,
    };
    let e = first_eigenvalue(grid, &vec![1.0; grid.len()], potential)?;
    let mut report = EigReport {
        lambda1: e.lambda1,
        residual: e.residual,
        iterations: e.iterations,
        s_hat: None,
        theta_hat: None,
        xi_hat: None,
    };
    if let PsiKind::Anisotropic { exponents } = model.psi_kind() {
        let opts = AnisoOptions {
            seed: cfg.solver.level.seed,
            ..Default::default()
        };
        let c = anisotropic_constants(grid, exponents, &opts)?;
        report.s_hat = Some(c.s_hat);
        report.theta_hat = Some(c.theta_hat);
        report.xi_hat = Some(c.xi_hat);
    }
    let files = vec![out_dir.join("eig.json"), out_dir.join("eigenfunction.csv")];
    write_json(&files[0], &report)?;
    write_field(&files[1], grid, &e.e1)?;
    let summary = format!("lambda1 = {:.12e} after {} iterations", e.lambda1, e.iterations);
    Ok((
        Outcome {
            passed: true,
            files,
            summary,
        },
        report,
    ))
}

/// One line of `verify.jsonl`; `measured` is null when the quantity could not be evaluated.
#[derive(Debug, Clone, Serialize)]
struct CheckLine<'a> {
    name: &'a str,
    passed: bool,
    measured: Option<f64>,
    tolerance: f64,
    context: &'a str,
}

pub fn verify(model: &FunctionalModel, cfg: &RunConfig, out_dir: &Path) -> Result<(Outcome, Vec<CheckReport>)> {
    prepare(out_dir)?;
    let level = cfg.level_options();
    let mut checks = fd_check_functional_derivs(model, cfg.verify.fd_trials, level.seed);
    match scan_profile(model, &cfg.scan.radii(), &cfg.scan_options()) {
        Ok(profile) => {
            checks.extend(fd_check_zeta(model, &profile, cfg.verify.fd_delta_rel, level));
            checks.extend(invariant_suite(model, &profile, None, level));
        }
        Err(e) => checks.push(CheckReport::new("scan", f64::INFINITY, 0.0, e.to_string())),
    }
    let lines: Vec<CheckLine> = checks
        .iter()
        .map(|c| CheckLine {
            name: &c.name,
            passed: c.passed,
            measured: c.measured.is_finite().then_some(c.measured),
            tolerance: c.tolerance,
            context: &c.context,
        })
        .collect();
    let path = out_dir.join("verify.jsonl");
    write_json_lines(&path, &lines)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    let summary = format!("{} checks, {failed} failed", checks.len());
    Ok((
        Outcome {
            passed: all_passed(&checks),
            files: vec![path],
            summary,
        },
        checks,
    ))
}
