//! Maximization of `Phi` on the level set `{Psi = r}`.
//!
//! Iterates are kept exactly on the level set by radial rescaling
//! `u -> t_u(r) u`. The ascent direction is the Riesz gradient of `Phi`
//! projected onto the tangent space `{v : Psi'(u) v = 0}` in the natural
//! inner product, with backtracking on `Phi` after rescaling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{axis_deriv_pnorm, Field, Grid, GridKind, Stiffness, RIESZ_TOL};
use crate::linalg::{add_scaled, dot};
use crate::models::{FunctionalModel, PsiKind};

/// Default seed for the pseudo-random start directions.
pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LevelMaxOptions {
    /// Cold starts: a positive bump, a first-eigenfunction estimate, then random smooth fields.
    pub starts: usize,
    pub max_iter: usize,
    /// Stationarity tolerance relative to `1 + ||Phi'(u)||_*`.
    pub tol_stat: f64,
    /// Absolute tolerance on `|Psi(u) - r|`.
    pub tol_level: f64,
    /// Tolerance on `|multiplier - ratio|` required for convergence.
    pub tol_multiplier: f64,
    /// Relative `Phi` slack when selecting among near-optimal maximizers.
    pub phi_slack: f64,
    pub seed: u64,
    /// Replace iterates by `|u|` when the model allows it.
    pub symmetrize: bool,
}

impl Default for LevelMaxOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            max_iter: 2000,
            tol_stat: 1e-10,
            tol_level: 1e-10,
            tol_multiplier: 1e-9,
            phi_slack: 1e-6,
            seed: DEFAULT_SEED,
            symmetrize: true,
        }
    }
}

impl LevelMaxOptions {
    /// Stationarity target given `||Phi'(u)||_*`.
    pub fn stat_tolerance(&self, grad_phi_dual: f64) -> f64 {
        self.tol_stat * (1.0 + grad_phi_dual)
    }

    pub fn slack(&self, phi: f64) -> f64 {
        self.phi_slack * phi.abs().max(1.0)
    }
}

/// A maximizer of `Phi` on `{Psi = r}` together with its certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMaxResult {
    pub r: f64,
    pub maximizer: Field,
    pub phi_value: f64,
    /// Least-squares Lagrange multiplier of `Phi' = mu Psi'` in the dual norm.
    pub multiplier: f64,
    /// `Phi'(u) u / Psi'(u) u`.
    pub ratio: f64,
    pub starts_used: usize,
    pub iterations: usize,
    pub level_error: f64,
    /// Dual norm of `Phi'(u) - multiplier Psi'(u)`.
    pub stationarity: f64,
    pub start_index: usize,
    pub converged: bool,
}

/// Scalar `t > 0` with `Psi(t u) = r`.
pub fn scale_to_level(model: &FunctionalModel, u: &[f64], r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("level must be positive, got {r}")));
    }
    let psi_u = model.psi(u);
    if !(psi_u > 0.0) {
        return Err(Error::InvalidArgument("cannot rescale the zero field".into()));
    }
    if let Some(q) = model.homogeneity() {
        return Ok((r / psi_u).powf(1.0 / q));
    }
    match model.psi_kind() {
        PsiKind::Anisotropic { exponents } => {
            // Psi(t u) = sum_i c_i t^p_i with c_i = 1/p_i int |d_i u|^p_i
            let terms: Vec<(f64, f64)> = exponents
                .iter()
                .enumerate()
                .map(|(axis, &p)| {
                    let c = axis_deriv_pnorm(model.grid(), u, axis, p).expect("valid exponent") / p;
                    (c, p)
                })
                .collect();
            let value = |t: f64| terms.iter().map(|&(c, p)| c * t.powf(p)).sum::<f64>();
            let slope = |t: f64| terms.iter().map(|&(c, p)| c * p * t.powf(p - 1.0)).sum::<f64>();
            monotone_root(value, slope, r)
        }
        _ => scale_to_level_bracketed(model, u, r),
    }
}

/// [`scale_to_level`] through the generic bracketed root finder, ignoring any closed form.
pub fn scale_to_level_bracketed(model: &FunctionalModel, u: &[f64], r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("level must be positive, got {r}")));
    }
    if !(model.psi(u) > 0.0) {
        return Err(Error::InvalidArgument("cannot rescale the zero field".into()));
    }
    let u = Field::new(u.to_vec());
    monotone_root(|t| model.psi(&u.scaled(t)), |t| model.psi_dderiv(&u.scaled(t), &u), r)
}

/// Root of the increasing map `value(t) = r` on `(0, inf)`: safeguarded
/// Newton inside a shrinking bisection bracket, finished by one Newton step.
fn monotone_root<V: Fn(f64) -> f64, D: Fn(f64) -> f64>(value: V, slope: D, r: f64) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut doublings = 0;
    while value(hi) < r {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 1100 || !hi.is_finite() {
            return Err(Error::LevelBracket { r });
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let h = value(t) - r;
        if h == 0.0 {
            return Ok(t);
        }
        if h < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let d = slope(t);
        let newton = t - h / d;
        t = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        if (h.abs()) <= 1e-3 * f64::EPSILON * r.max(1.0) {
            break;
        }
    }
    let d = slope(t);
    if d > 0.0 {
        let refined = t - (value(t) - r) / d;
        if refined > 0.0 && (value(refined) - r).abs() <= (value(t) - r).abs() {
            t = refined;
        }
    }
    Ok(t)
}

/// `t_u'(r) = 1 / Psi'(t_u(r) u) u`.
pub fn level_scale_derivative(model: &FunctionalModel, u: &[f64], r: f64) -> Result<f64> {
    let t = scale_to_level(model, u, r)?;
    let tu = Field::new(u.to_vec()).scaled(t);
    Ok(1.0 / model.psi_dderiv(&tu, u))
}

/// Rescales `u` onto the level set.
pub fn retract(model: &FunctionalModel, u: &[f64], r: f64) -> Result<Field> {
    let t = scale_to_level(model, u, r)?;
    Ok(Field::new(u.iter().map(|x| t * x).collect()))
}

/// First-order quantities of the constrained problem at `u`.
#[derive(Debug, Clone)]
pub struct Stationarity {
    pub grad_phi: Vec<f64>,
    pub grad_psi: Vec<f64>,
    /// Tangent Riesz gradient `R(Phi') - multiplier R(Psi')`.
    pub tangent: Vec<f64>,
    pub multiplier: f64,
    pub ratio: f64,
    pub stationarity: f64,
    /// `||Phi'(u)||_*`.
    pub grad_phi_dual: f64,
}

pub fn stationarity(model: &FunctionalModel, u: &[f64]) -> Result<Stationarity> {
    let grad_phi = model.phi_grad(u);
    let grad_psi = model.psi_grad(u);
    let riesz_phi = model.riesz(&grad_phi)?;
    // quadratic energies: the Riesz map of Psi'(u) is u itself
    let riesz_psi = match model.psi_kind() {
        PsiKind::Semilinear | PsiKind::SchrodingerRadial { .. } => u.to_vec(),
        PsiKind::Anisotropic { .. } => model.riesz(&grad_psi)?,
    };
    let psi_norm2 = dot(&grad_psi, &riesz_psi);
    let multiplier = dot(&grad_phi, &riesz_psi) / psi_norm2;
    let ratio = dot(&grad_phi, u) / dot(&grad_psi, u);
    let tangent = add_scaled(&riesz_phi, -multiplier, &riesz_psi);
    let residual = add_scaled(&grad_phi, -multiplier, &grad_psi);
    let stationarity = dot(&residual, &tangent).max(0.0).sqrt();
    let grad_phi_dual = dot(&grad_phi, &riesz_phi).max(0.0).sqrt();
    Ok(Stationarity {
        grad_phi,
        grad_psi,
        tangent,
        multiplier,
        ratio,
        stationarity,
        grad_phi_dual,
    })
}

/// Deterministic start directions; the random part is a nested sequence in `count`.
pub fn start_directions(model: &FunctionalModel, count: usize, seed: u64) -> Result<Vec<Field>> {
    start_directions_on(model.grid(), model.stiffness(), count, seed)
}

pub(crate) fn start_directions_on(grid: &Grid, form: &Stiffness, count: usize, seed: u64) -> Result<Vec<Field>> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return Ok(out);
    }
    let bump = positive_bump(grid);
    out.push(bump.clone());
    if count == 1 {
        return Ok(out);
    }
    out.push(eigen_estimate(grid, form, &bump)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < count {
        out.push(random_smooth_field(grid, &mut rng));
    }
    Ok(out)
}

fn positive_bump(grid: &Grid) -> Field {
    let (lo, hi) = (grid.lower().to_vec(), grid.upper().to_vec());
    match grid.kind() {
        GridKind::Radial => grid.sample(|x| hi[0] * hi[0] - x[0] * x[0]),
        _ => grid.sample(|x| x.iter().enumerate().map(|(a, &t)| (t - lo[a]) * (hi[a] - t)).product()),
    }
}

/// A few inverse iterations of the natural form against the mass matrix.
fn eigen_estimate(grid: &Grid, form: &Stiffness, start: &Field) -> Result<Field> {
    let w = grid.quad_weights();
    let mut e = start.clone().into_inner();
    for _ in 0..12 {
        let rhs: Vec<f64> = e.iter().zip(w).map(|(x, w)| x * w).collect();
        e = form.solve(&rhs, RIESZ_TOL, form.default_max_iter())?;
        let n = e.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        e.iter_mut().for_each(|x| *x /= n);
    }
    Ok(Field::new(e))
}

/// Random combination of the lowest Dirichlet modes of the domain.
pub fn random_smooth_field(grid: &Grid, rng: &mut ChaCha8Rng) -> Field {
    let (lo, hi) = (grid.lower().to_vec(), grid.upper().to_vec());
    match grid.kind() {
        GridKind::Interval => {
            let c: Vec<f64> = (1..=6).map(|k| rng.gen_range(-1.0..1.0) / k as f64).collect();
            let len = hi[0] - lo[0];
            grid.sample(|x| {
                let s = (x[0] - lo[0]) / len;
                c.iter()
                    .enumerate()
                    .map(|(k, c)| c * ((k + 1) as f64 * std::f64::consts::PI * s).sin())
                    .sum()
            })
        }
        GridKind::Rectangle => {
            let mut c = [[0.0; 4]; 4];
            for (k, row) in c.iter_mut().enumerate() {
                for (l, v) in row.iter_mut().enumerate() {
                    *v = rng.gen_range(-1.0..1.0) / (k + l + 1) as f64;
                }
            }
            let (lx, ly) = (hi[0] - lo[0], hi[1] - lo[1]);
            grid.sample(|x| {
                let (sx, sy) = ((x[0] - lo[0]) / lx, (x[1] - lo[1]) / ly);
                let mut acc = 0.0;
                for (k, row) in c.iter().enumerate() {
                    for (l, v) in row.iter().enumerate() {
                        acc += v
                            * ((k + 1) as f64 * std::f64::consts::PI * sx).sin()
                            * ((l + 1) as f64 * std::f64::consts::PI * sy).sin();
                    }
                }
                acc
            })
        }
        GridKind::Radial => {
            let c: Vec<f64> = (1..=6).map(|k| rng.gen_range(-1.0..1.0) / k as f64).collect();
            let r_max = hi[0];
            grid.sample(|x| {
                c.iter()
                    .enumerate()
                    .map(|(k, c)| c * ((k as f64 + 0.5) * std::f64::consts::PI * x[0] / r_max).cos())
                    .sum()
            })
        }
    }
}

/// Tangent gradient of `Phi` on the level set in a local metric, with its multiplier.
fn metric_tangent(metric: &Stiffness, state: &Stationarity) -> Result<(Vec<f64>, f64)> {
    let iters = metric.default_max_iter();
    let d_phi = metric.solve(&state.grad_phi, RIESZ_TOL, iters)?;
    let d_psi = metric.solve(&state.grad_psi, RIESZ_TOL, iters)?;
    let nu = dot(&state.grad_phi, &d_psi) / dot(&state.grad_psi, &d_psi);
    Ok((add_scaled(&d_phi, -nu, &d_psi), nu))
}

struct StartOutcome {
    result: LevelMaxResult,
}

fn ascend(
    model: &FunctionalModel,
    r: f64,
    start: &Field,
    index: usize,
    opts: &LevelMaxOptions,
) -> Result<StartOutcome> {
    let symmetrize = opts.symmetrize && model.admits_symmetrization();
    let prepared = if symmetrize { start.abs() } else { start.clone() };
    let mut u = retract(model, &prepared, r)?;
    let mut phi = model.phi(&u);
    let mut step: Option<f64> = None;
    let mut iterations = 0;
    let mut state = stationarity(model, &u)?;
    let mut converged = false;
    loop {
        let tol = opts.stat_tolerance(state.grad_phi_dual);
        if state.stationarity <= tol && (state.multiplier - state.ratio).abs() <= opts.tol_multiplier {
            converged = true;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        let (direction, scale) = match model.psi_metric(&u)? {
            None => (state.tangent.clone(), state.multiplier),
            Some(metric) => metric_tangent(&metric, &state)?,
        };
        let mut s = match step {
            Some(s) => 2.0 * s,
            None if scale > 0.0 => 1.0 / scale,
            None => 1.0,
        };
        // below this band Phi cannot resolve the ascent; stationarity decides instead
        let floor = phi - 16.0 * f64::EPSILON * phi.abs().max(1.0);
        let mut accepted = None;
        for _ in 0..80 {
            let mut cand = add_scaled(&u, s, &direction);
            if symmetrize {
                cand.iter_mut().for_each(|x| *x = x.abs());
            }
            if let Ok(c) = retract(model, &cand, r) {
                let phi_c = model.phi(&c);
                if phi_c > phi {
                    accepted = Some((c, phi_c, None));
                    break;
                }
                if phi_c >= floor {
                    let st = stationarity(model, &c)?;
                    if st.stationarity < state.stationarity {
                        accepted = Some((c, phi_c.max(phi), Some(st)));
                        break;
                    }
                }
            }
            s *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((c, phi_c, st)) => {
                u = c;
                phi = phi_c;
                step = Some(s);
                state = match st {
                    Some(st) => st,
                    None => stationarity(model, &u)?,
                };
            }
            // no ascent left at working precision
            None => break,
        }
    }
    let level_error = (model.psi(&u) - r).abs();
    Ok(StartOutcome {
        result: LevelMaxResult {
            r,
            phi_value: phi,
            multiplier: state.multiplier,
            ratio: state.ratio,
            starts_used: 0,
            iterations,
            level_error,
            stationarity: state.stationarity,
            start_index: index,
            converged,
            maximizer: u,
        },
    })
}

/// Runs every start and returns the converged candidates (ordered by start index).
pub fn level_candidates(
    model: &FunctionalModel,
    r: f64,
    opts: &LevelMaxOptions,
    warm_start: Option<&Field>,
) -> Result<Vec<LevelMaxResult>> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("level must be positive, got {r}")));
    }
    let mut starts = Vec::with_capacity(opts.starts + 1);
    if let Some(w) = warm_start {
        model.check(w)?;
        starts.push(w.clone());
    }
    starts.extend(start_directions(model, opts.starts, opts.seed)?);
    let used = starts.len();

    let run = |(i, s): (usize, &Field)| ascend(model, r, s, i, opts).map(|o| o.result);
    #[cfg(feature = "parallel")]
    let outcomes: Vec<Result<LevelMaxResult>> = {
        use rayon::prelude::*;
        starts.par_iter().enumerate().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Result<LevelMaxResult>> = starts.iter().enumerate().map(run).collect();

    let mut all = Vec::with_capacity(used);
    for o in outcomes {
        match o {
            Ok(mut res) => {
                res.starts_used = used;
                all.push(res);
            }
            // a start that rescales to nothing (e.g. |u| of a vanishing field) is skipped
            Err(Error::InvalidArgument(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let best_any = all.iter().max_by(|a, b| a.phi_value.total_cmp(&b.phi_value)).cloned();
    let converged: Vec<LevelMaxResult> = all.into_iter().filter(|c| c.converged).collect();
    if converged.is_empty() {
        return match best_any {
            Some(best) => Err(Error::MaximizerFailed { best: Box::new(best) }),
            None => Err(Error::InvalidArgument("no usable start direction".into())),
        };
    }
    Ok(converged)
}

/// Best `Phi` value over all starts.
pub fn maximize_on_level(
    model: &FunctionalModel,
    r: f64,
    opts: &LevelMaxOptions,
    warm_start: Option<&Field>,
) -> Result<LevelMaxResult> {
    let candidates = level_candidates(model, r, opts, warm_start)?;
    Ok(candidates
        .into_iter()
        .reduce(|best, c| if c.phi_value > best.phi_value { c } else { best })
        .expect("nonempty"))
}

/// Among candidates within `phi_slack` of the best value, the one with the
/// largest `Phi'(u)u / Psi'(u)u`; ties go to larger `Phi`, then to the lower start.
pub fn select_energy_max_point(candidates: &[LevelMaxResult], phi_slack: f64) -> Result<LevelMaxResult> {
    let best_phi = candidates.iter().map(|c| c.phi_value).fold(f64::NEG_INFINITY, f64::max);
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no candidates to select from".into()));
    }
    let mut pool: Vec<&LevelMaxResult> = candidates
        .iter()
        .filter(|c| c.phi_value >= best_phi - phi_slack)
        .collect();
    pool.sort_by(|a, b| {
        b.ratio
            .total_cmp(&a.ratio)
            .then(b.phi_value.total_cmp(&a.phi_value))
            .then(a.start_index.cmp(&b.start_index))
    });
    Ok(pool[0].clone())
}
