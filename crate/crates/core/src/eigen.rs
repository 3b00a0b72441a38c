//! First eigenpairs of weighted Dirichlet problems and sampled constants of the
//! anisotropic embedding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{add_axis_pnorm_gradient, axis_deriv_pnorm, Field, Grid, GridKind, Stiffness};
use crate::linalg::{add_scaled, dot, norm};
use crate::spheremax::start_directions_on;

pub const EIGEN_CG_TOL: f64 = 1e-12;
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub lambda1: f64,
    /// Normalised to unit energy `e^T A e = 1`, positive maximum.
    pub e1: Field,
    /// `||A e - lambda B e|| / ||A e||`.
    pub residual: f64,
    pub iterations: usize,
}

/// Smallest `lambda` with `-Delta e + V e = lambda beta e`, by inverse iteration.
pub fn first_eigenvalue(grid: &Grid, beta: &[f64], potential: Option<&[f64]>) -> Result<EigenResult> {
    grid.check(beta)?;
    if beta.iter().any(|&b| b < 0.0 || !b.is_finite()) {
        return Err(Error::InvalidArgument("weight must be finite and nonnegative".into()));
    }
    if beta.iter().all(|&b| b == 0.0) {
        return Err(Error::InvalidArgument("weight vanishes identically".into()));
    }
    let a = Stiffness::new(grid, potential)?;
    let mass: Vec<f64> = beta.iter().zip(grid.quad_weights()).map(|(b, w)| b * w).collect();
    let bmul = |x: &[f64]| -> Vec<f64> { x.iter().zip(&mass).map(|(x, m)| x * m).collect() };

    let max_iter = 2000;
    let mut e = vec![1.0; grid.len()];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let next = a.solve(&bmul(&e), EIGEN_CG_TOL, 10 * a.default_max_iter())?;
        let scale = norm(&next);
        e = next.iter().map(|x| x / scale).collect();
        let ae = a.mul(&e);
        let be = bmul(&e);
        let lambda = dot(&e, &ae) / dot(&e, &be);
        residual = norm(&add_scaled(&ae, -lambda, &be)) / norm(&ae);
        if residual <= EIGEN_RESIDUAL_TOL {
            let energy = dot(&e, &ae).sqrt();
            let sign = if e.iter().cloned().fold(f64::NEG_INFINITY, f64::max) > 0.0 {
                1.0
            } else {
                -1.0
            };
            e.iter_mut().for_each(|x| *x *= sign / energy);
            return Ok(EigenResult {
                lambda1: lambda,
                e1: Field::new(e),
                residual,
                iterations: it,
            });
        }
    }
    Err(Error::EigenNotConverged {
        iterations: max_iter,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnisoOptions {
    pub starts: usize,
    pub max_iter: usize,
    /// Stop once a step lowers the objective by less than this relative amount.
    pub tol_rel: f64,
    pub seed: u64,
}

impl Default for AnisoOptions {
    fn default() -> Self {
        Self {
            starts: 4,
            max_iter: 400,
            tol_rel: 1e-12,
            seed: crate::spheremax::DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnisoConstants {
    /// Smallest `sum_i ||d_i u||_{p_i}^{p_i}` found on `{||u+||_{p_N} = 1}`.
    pub s_hat: f64,
    /// Largest `|u|_{p_N} / ||u||_p` seen; a lower bound for the embedding constant.
    pub theta_hat: f64,
    /// Smallest `(1/p_N) sum_i ||d_i u||_{p_i}^{p_N} / ||u||_p^{p_N}` seen; an upper bound for `xi`.
    pub xi_hat: f64,
    /// The iterate realising `theta_hat`.
    pub theta_witness: Field,
    /// `||theta_witness||_p`.
    pub theta_witness_norm: f64,
    pub s_minimizer: Field,
    pub iterations: usize,
}

/// `sum_i ||d_i u||_{p_i}^{p_i}`.
pub fn s_objective(grid: &Grid, u: &[f64], exponents: &[f64]) -> Result<f64> {
    exponents
        .iter()
        .enumerate()
        .map(|(axis, &p)| axis_deriv_pnorm(grid, u, axis, p))
        .sum()
}

/// `|u|_q` by nodal quadrature.
pub fn lebesgue_norm(grid: &Grid, u: &[f64], q: f64) -> f64 {
    u.iter()
        .zip(grid.quad_weights())
        .map(|(x, w)| w * x.abs().powf(q))
        .sum::<f64>()
        .powf(1.0 / q)
}

/// `||u||_p = sum_i ||d_i u||_{p_i}`.
pub fn aniso_norm(grid: &Grid, u: &[f64], exponents: &[f64]) -> Result<f64> {
    exponents
        .iter()
        .enumerate()
        .map(|(axis, &p)| axis_deriv_pnorm(grid, u, axis, p).map(|v| v.powf(1.0 / p)))
        .sum()
}

fn positive_part_norm(grid: &Grid, u: &[f64], q: f64) -> f64 {
    u.iter()
        .zip(grid.quad_weights())
        .map(|(x, w)| w * x.max(0.0).powf(q))
        .sum::<f64>()
        .powf(1.0 / q)
}

/// Places `|v|` on the constraint set `{||u+||_q = 1}`.
fn retract_positive(grid: &Grid, v: &[f64], q: f64) -> Option<Vec<f64>> {
    let a: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let n = positive_part_norm(grid, &a, q);
    (n > 0.0 && n.is_finite()).then(|| a.iter().map(|x| x / n).collect())
}

/// Sampled `S`, `Theta` and `xi` for the anisotropic energy on a rectangle.
pub fn anisotropic_constants(grid: &Grid, exponents: &[f64], opts: &AnisoOptions) -> Result<AnisoConstants> {
    if grid.kind() != GridKind::Rectangle {
        return Err(Error::InvalidArgument(
            "anisotropic constants need a rectangle grid".into(),
        ));
    }
    if exponents.len() != grid.axes() {
        return Err(Error::InvalidArgument(format!(
            "expected {} exponents, got {}",
            grid.axes(),
            exponents.len()
        )));
    }
    if exponents.iter().any(|&p| !(p > 1.0)) || exponents.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("exponents must exceed 1 and be ordered".into()));
    }
    if opts.starts == 0 {
        return Err(Error::InvalidArgument("need at least one start".into()));
    }
    let q = *exponents.last().expect("nonempty");
    let form = Stiffness::new(grid, None)?;
    let starts = start_directions_on(grid, &form, opts.starts, opts.seed)?;

    let mut best_s = f64::INFINITY;
    let mut s_minimizer = None;
    let mut theta = (f64::NEG_INFINITY, Vec::new(), 0.0);
    let mut xi_hat = f64::INFINITY;
    let mut total_iter = 0;

    let observe = |u: &[f64], theta: &mut (f64, Vec<f64>, f64), xi_hat: &mut f64| -> Result<()> {
        let nrm = aniso_norm(grid, u, exponents)?;
        if nrm > 0.0 {
            let ratio = lebesgue_norm(grid, u, q) / nrm;
            if ratio > theta.0 {
                *theta = (ratio, u.to_vec(), nrm);
            }
            let mut xi_num = 0.0;
            for (axis, &p) in exponents.iter().enumerate() {
                xi_num += axis_deriv_pnorm(grid, u, axis, p)?.powf(q / p);
            }
            *xi_hat = xi_hat.min(xi_num / q / nrm.powf(q));
        }
        Ok(())
    };

    for start in starts {
        let Some(mut u) = retract_positive(grid, &start, q) else {
            continue;
        };
        let mut s = s_objective(grid, &u, exponents)?;
        observe(&u, &mut theta, &mut xi_hat)?;
        let mut step = 0.0;
        for _ in 0..opts.max_iter {
            total_iter += 1;
            let mut g = vec![0.0; u.len()];
            for (axis, &p) in exponents.iter().enumerate() {
                add_axis_pnorm_gradient(grid, &u, axis, p, 1.0, &mut g);
            }
            // gradient of ||u+||_q^q, the constraint
            let c: Vec<f64> = u
                .iter()
                .zip(grid.quad_weights())
                .map(|(x, w)| q * w * x.max(0.0).powf(q - 1.0))
                .collect();
            let dg = form.solve(&g, crate::grid::RIESZ_TOL, form.default_max_iter())?;
            let dc = form.solve(&c, crate::grid::RIESZ_TOL, form.default_max_iter())?;
            let mu = dot(&g, &dc) / dot(&c, &dc);
            let dir = add_scaled(&dg, -mu, &dc);
            let slope = dot(&g, &dir);
            if !(slope > 0.0) {
                break;
            }
            if step == 0.0 {
                step = s / slope;
            } else {
                step *= 2.0;
            }
            let mut accepted = None;
            for _ in 0..60 {
                if let Some(v) = retract_positive(grid, &add_scaled(&u, -step, &dir), q) {
                    let sv = s_objective(grid, &v, exponents)?;
                    if sv < s {
                        accepted = Some((v, sv));
                        break;
                    }
                }
                step *= 0.5;
            }
            let Some((v, sv)) = accepted else { break };
            let gain = (s - sv) / s;
            u = v;
            s = sv;
            observe(&u, &mut theta, &mut xi_hat)?;
            if gain < opts.tol_rel {
                break;
            }
        }
        if s < best_s {
            best_s = s;
            s_minimizer = Some(u);
        }
    }
    let s_minimizer = s_minimizer.ok_or_else(|| Error::InvalidArgument("no usable start".into()))?;
    Ok(AnisoConstants {
        s_hat: best_s,
        theta_hat: theta.0,
        xi_hat,
        theta_witness: Field::new(theta.1),
        theta_witness_norm: theta.2,
        s_minimizer: Field::new(s_minimizer),
        iterations: total_iter,
    })
}
