//! The energy function `zeta(r) = r - phi(r)` and the drivers built on it.
//!
//! `phi(r)` is the maximum of `Phi` on `{Psi = r}`, so `zeta(r)` is the
//! minimum of `J` on the same level set. Its derivative is available in closed
//! form at an energy-maximum-type point `u_r`:
//! `zeta'(r) = 1 - Phi'(u_r) u_r / Psi'(u_r) u_r`, and a zero of `zeta'`
//! certifies `u_r` as a critical point of `J`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, GeometryWitness, Result};
use crate::grid::Field;
use crate::linalg::add_scaled;
use crate::models::FunctionalModel;
use crate::spheremax::{
    level_candidates, random_smooth_field, select_energy_max_point, LevelMaxOptions, LevelMaxResult,
};

/// One row of an energy profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub r: f64,
    pub phi: f64,
    pub zeta: f64,
    pub dzeta: f64,
    pub lambda_r: f64,
    pub detail: LevelMaxResult,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyProfile {
    pub samples: Vec<EnergySample>,
    /// Level at which the scan stopped on a maximizer failure.
    pub failed_at: Option<f64>,
}

impl EnergyProfile {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn push(&mut self, sample: EnergySample) {
        self.samples.push(sample);
    }

    /// Inserts a sample keeping the radii strictly increasing; duplicates are dropped.
    fn insert(&mut self, sample: EnergySample) {
        let pos = self.samples.partition_point(|s| s.r < sample.r);
        if self.samples.get(pos).is_some_and(|s| s.r == sample.r) {
            return;
        }
        self.samples.insert(pos, sample);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanOptions {
    pub level: LevelMaxOptions,
    /// Reuse the previous maximizer as an extra start for the next level.
    pub warm_start: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            level: LevelMaxOptions::default(),
            warm_start: true,
        }
    }
}

/// `zeta(r)` and, for `r > 0`, the selected energy-maximum-type point.
pub fn zeta_eval(
    model: &FunctionalModel,
    r: f64,
    opts: &LevelMaxOptions,
    warm_start: Option<&Field>,
) -> Result<(f64, Option<LevelMaxResult>)> {
    if r == 0.0 {
        let zero = Field::zeros(model.grid().len());
        return Ok((model.energy(&zero), None));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("level must be nonnegative, got {r}")));
    }
    let candidates = level_candidates(model, r, opts, warm_start)?;
    let best = candidates.iter().map(|c| c.phi_value).fold(f64::NEG_INFINITY, f64::max);
    let selected = select_energy_max_point(&candidates, opts.slack(best))?;
    Ok((r - selected.phi_value, Some(selected)))
}

/// `zeta'(r) = 1 - Phi'(u_r) u_r / Psi'(u_r) u_r`.
pub fn zeta_derivative(detail: &LevelMaxResult) -> f64 {
    1.0 - detail.ratio
}

fn sample_at(model: &FunctionalModel, r: f64, opts: &LevelMaxOptions, warm: Option<&Field>) -> Result<EnergySample> {
    let (zeta, detail) = zeta_eval(model, r, opts, warm)?;
    let detail = detail.ok_or_else(|| Error::InvalidArgument("profile radii must be positive".into()))?;
    Ok(EnergySample {
        r,
        phi: detail.phi_value,
        zeta,
        dzeta: zeta_derivative(&detail),
        lambda_r: detail.ratio,
        detail,
    })
}

/// `n` log-spaced radii from `r_min` to `r_max` inclusive.
pub fn geometric_grid(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![r_min];
    }
    let (a, b) = (r_min.ln(), r_max.ln());
    (0..n)
        .map(|k| {
            if k + 1 == n {
                r_max
            } else {
                (a + (b - a) * k as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

pub fn linear_grid(r_min: f64, r_max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![r_min];
    }
    (0..n)
        .map(|k| r_min + (r_max - r_min) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Samples `zeta` along increasing radii.
pub fn scan_profile(model: &FunctionalModel, r_grid: &[f64], opts: &ScanOptions) -> Result<EnergyProfile> {
    if r_grid.is_empty() {
        return Err(Error::InvalidArgument("empty radius grid".into()));
    }
    if r_grid[0] <= 0.0 || r_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(
            "radii must be positive and strictly increasing".into(),
        ));
    }
    let mut profile = EnergyProfile::default();

    #[cfg(feature = "parallel")]
    if !opts.warm_start {
        use rayon::prelude::*;
        let results: Vec<Result<EnergySample>> = r_grid
            .par_iter()
            .map(|&r| sample_at(model, r, &opts.level, None))
            .collect();
        for (r, res) in r_grid.iter().zip(results) {
            match res {
                Ok(s) => profile.push(s),
                Err(e) => return Err(scan_failure(*r, profile, e)),
            }
        }
        return Ok(profile);
    }

    for &r in r_grid {
        let warm = if opts.warm_start {
            profile.samples.last().map(|s| s.detail.maximizer.clone())
        } else {
            None
        };
        match sample_at(model, r, &opts.level, warm.as_ref()) {
            Ok(s) => profile.push(s),
            Err(e) => return Err(scan_failure(r, profile, e)),
        }
    }
    Ok(profile)
}

fn scan_failure(r: f64, mut partial: EnergyProfile, source: Error) -> Error {
    partial.failed_at = Some(r);
    Error::ScanFailed {
        r,
        partial: Box::new(partial),
        source: Box::new(source),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CriticalOptions {
    pub tol_crit: f64,
    pub max_bisect: usize,
    /// Residual tolerance relative to `1 + ||Psi'(u*)||_*`.
    pub tol_res: f64,
    /// Brackets tried before giving up, counting those found by local rescans.
    pub max_brackets: usize,
    /// Half-width, relative to `r`, of the rescan around a corner.
    pub refine_window: f64,
    pub refine_samples: usize,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        Self {
            tol_crit: 1e-8,
            max_bisect: 200,
            tol_res: 1e-6,
            max_brackets: 8,
            refine_window: 0.1,
            refine_samples: 17,
        }
    }
}

/// A sign change of `zeta'` (or a sampled interior maximum of `zeta`) between two radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    /// True when `zeta` has a local maximum inside.
    pub maximum: bool,
    pub zeta_peak: f64,
}

/// A downward jump of `zeta'`: two maximizer branches exchange the global
/// maximum there, so `zeta` has a corner rather than a critical point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corner {
    pub r: f64,
    pub zeta: f64,
    pub dzeta_left: f64,
    pub dzeta_right: f64,
}

/// Mountain-pass witnesses: `zeta(rho) = alpha > J(0)` and `J(w) = zeta(R) < alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MountainPassWitness {
    pub rho: f64,
    pub alpha: f64,
    pub big_r: f64,
    pub j0: f64,
    pub jw: f64,
    pub w_description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub r_star: f64,
    pub c_star: f64,
    pub dzeta: f64,
    pub lambda_r: f64,
    pub gamma_r: f64,
    pub residual_dual: f64,
    /// `||Psi'(u*)||_*`, the scale of the residual tolerance.
    pub psi_dual: f64,
    pub tol_res: f64,
    pub tol_crit: f64,
    pub solution: Field,
    pub detail: LevelMaxResult,
    pub brackets: Vec<Bracket>,
    /// Corners met while refining; a corner may carry a larger `zeta` than `c_star`.
    pub corners: Vec<Corner>,
    pub witness: Option<MountainPassWitness>,
    pub nehari_min_sampled: Option<f64>,
}

fn find_brackets(profile: &EnergyProfile) -> Vec<Bracket> {
    let s = &profile.samples;
    let mut out = Vec::new();
    for i in 0..s.len().saturating_sub(1) {
        let (a, b) = (&s[i], &s[i + 1]);
        if a.dzeta == 0.0 || a.dzeta.signum() != b.dzeta.signum() && b.dzeta != 0.0 {
            out.push(Bracket {
                lo: a.r,
                hi: b.r,
                maximum: a.dzeta >= 0.0 && b.dzeta <= 0.0,
                zeta_peak: a.zeta.max(b.zeta),
            });
        }
    }
    for i in 1..s.len().saturating_sub(1) {
        if s[i].zeta > s[i - 1].zeta && s[i].zeta > s[i + 1].zeta {
            let covered = out.iter().any(|b| b.lo >= s[i - 1].r && b.hi <= s[i + 1].r);
            if !covered {
                out.push(Bracket {
                    lo: s[i - 1].r,
                    hi: s[i + 1].r,
                    maximum: true,
                    zeta_peak: s[i].zeta,
                });
            }
        }
    }
    out.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    out
}

/// Maxima by decreasing peak, then the remaining sign changes by radius.
fn prioritize(mut brackets: Vec<Bracket>) -> Vec<Bracket> {
    brackets.sort_by(|a, b| {
        b.maximum.cmp(&a.maximum).then(if a.maximum {
            b.zeta_peak.total_cmp(&a.zeta_peak)
        } else {
            a.lo.total_cmp(&b.lo)
        })
    });
    brackets
}

enum Refined {
    Root(EnergySample),
    Corner(Corner),
    /// Sampled peak without a sign change of `zeta'` in the samples.
    Peak(f64),
}

fn sample_near(profile: &EnergyProfile, r: f64) -> &EnergySample {
    profile
        .samples
        .iter()
        .min_by(|a, b| (a.r - r).abs().total_cmp(&(b.r - r).abs()))
        .expect("nonempty profile")
}

fn bisect(
    model: &FunctionalModel,
    profile: &EnergyProfile,
    bracket: &Bracket,
    level: &LevelMaxOptions,
    opts: &CriticalOptions,
) -> Result<Refined> {
    let mut lo = sample_near(profile, bracket.lo).clone();
    let mut hi = sample_near(profile, bracket.hi).clone();
    if lo.dzeta.signum() == hi.dzeta.signum() && lo.dzeta != 0.0 && hi.dzeta != 0.0 {
        let peak = profile
            .samples
            .iter()
            .filter(|s| s.r > bracket.lo && s.r < bracket.hi)
            .max_by(|a, b| a.zeta.total_cmp(&b.zeta))
            .map_or(0.5 * (bracket.lo + bracket.hi), |s| s.r);
        return Ok(Refined::Peak(peak));
    }
    let mut best = if lo.dzeta.abs() <= hi.dzeta.abs() {
        lo.clone()
    } else {
        hi.clone()
    };
    // zeta' only jumps downwards, so a + to - bracket may close on a corner
    let descending = lo.dzeta > 0.0;
    let mut gaps = vec![lo.dzeta - hi.dzeta];
    let mut steps = 0;
    while best.dzeta.abs() > opts.tol_crit && steps < opts.max_bisect {
        let mid = 0.5 * (lo.r + hi.r);
        if hi.r - lo.r <= 1e-12 * mid {
            break;
        }
        let warm = if (mid - lo.r) <= (hi.r - mid) { &lo } else { &hi };
        let s = sample_at(model, mid, level, Some(&warm.detail.maximizer))?;
        if s.dzeta.abs() < best.dzeta.abs() {
            best = s.clone();
        }
        if s.dzeta.signum() == lo.dzeta.signum() {
            lo = s;
        } else {
            hi = s;
        }
        steps += 1;
        gaps.push(lo.dzeta - hi.dzeta);
        // a continuous zeta' would have shrunk the gap about a thousandfold over ten halvings
        if descending && steps >= 12 && gaps[steps] > 0.5 * gaps[steps - 10] {
            break;
        }
    }
    if best.dzeta.abs() <= opts.tol_crit {
        return Ok(Refined::Root(best));
    }
    Ok(Refined::Corner(Corner {
        r: 0.5 * (lo.r + hi.r),
        zeta: lo.zeta.max(hi.zeta),
        dzeta_left: lo.dzeta,
        dzeta_right: hi.dzeta,
    }))
}

/// Refines a critical radius of `zeta` by bisection on `zeta'`.
///
/// Brackets around the largest sampled maxima go first. A bracket that
/// collapses onto a jump of `zeta'` is recorded as a corner and the
/// neighbourhood is rescanned; rising sign changes found there always hold a
/// smooth root (a local minimum of `zeta`), so they are tried before other maxima.
pub fn locate_critical(
    model: &FunctionalModel,
    profile: &EnergyProfile,
    level: &LevelMaxOptions,
    opts: &CriticalOptions,
) -> Result<CriticalReport> {
    let initial = find_brackets(profile);
    if initial.is_empty() {
        return Err(Error::NoBracket);
    }
    let mut reported = initial.clone();
    let mut pending: Vec<(Bracket, usize)> = prioritize(initial).into_iter().map(|b| (b, 0)).collect();
    let mut profiles = vec![profile.clone()];
    let mut corners: Vec<Corner> = Vec::new();
    let mut tried = 0;

    while !pending.is_empty() && tried < opts.max_brackets {
        let (bracket, source) = pending.remove(0);
        tried += 1;
        let centre = match bisect(model, &profiles[source], &bracket, level, opts)? {
            Refined::Root(sample) => {
                let mut report = build_report(model, sample, reported, opts)?;
                report.corners = corners;
                return Ok(report);
            }
            Refined::Corner(c) => {
                corners.push(c);
                c.r
            }
            Refined::Peak(r) => r,
        };
        let w = opts.refine_window;
        let radii = linear_grid(centre * (1.0 - w), centre * (1.0 + w), opts.refine_samples.max(3));
        let local = scan_profile(
            model,
            &radii,
            &ScanOptions {
                level: level.clone(),
                warm_start: true,
            },
        )?;
        // rising sign changes cannot hide a jump, so they go first
        let mut fresh: Vec<Bracket> = find_brackets(&local)
            .into_iter()
            .filter(|b| !(b.lo <= centre && centre <= b.hi))
            .filter(|b| !corners.iter().any(|c| b.lo <= c.r && c.r <= b.hi))
            .collect();
        fresh.sort_by(|a, b| a.maximum.cmp(&b.maximum).then(b.zeta_peak.total_cmp(&a.zeta_peak)));
        profiles.push(local);
        let idx = profiles.len() - 1;
        reported.extend(fresh.iter().copied());
        let mut next: Vec<(Bracket, usize)> = fresh.into_iter().map(|b| (b, idx)).collect();
        next.append(&mut pending);
        pending = next;
    }
    match corners.first() {
        Some(c) => Err(Error::CornerOnly {
            r: c.r,
            corners: corners.len(),
        }),
        None => Err(Error::NoBracket),
    }
}

fn build_report(
    model: &FunctionalModel,
    sample: EnergySample,
    brackets: Vec<Bracket>,
    opts: &CriticalOptions,
) -> Result<CriticalReport> {
    let u = &sample.detail.maximizer;
    let grad_psi = model.psi_grad(u);
    let grad_phi = model.phi_grad(u);
    let residual_dual = model.dual_norm(&add_scaled(&grad_psi, -1.0, &grad_phi))?;
    let psi_dual = model.dual_norm(&grad_psi)?;
    Ok(CriticalReport {
        r_star: sample.r,
        c_star: sample.zeta,
        dzeta: sample.dzeta,
        lambda_r: sample.lambda_r,
        gamma_r: 1.0 - sample.lambda_r,
        residual_dual,
        psi_dual,
        tol_res: opts.tol_res * (1.0 + psi_dual),
        tol_crit: opts.tol_crit,
        solution: u.clone(),
        detail: sample.detail,
        brackets,
        corners: Vec::new(),
        witness: None,
        nehari_min_sampled: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MountainPassOptions {
    /// Candidate small radii, scanned in increasing order.
    pub rho_grid: Vec<f64>,
    /// Largest radius tried while doubling towards the far witness.
    pub r_cap: f64,
    /// Samples of the log-spaced scan between the witnesses.
    pub scan_density: usize,
    /// Required margin in `zeta(rho) > J(0)` and `c* > max(J(0), J(w))`.
    pub margin: f64,
}

impl Default for MountainPassOptions {
    fn default() -> Self {
        Self {
            rho_grid: geometric_grid(1e-3, 10.0, 9),
            r_cap: 1e7,
            scan_density: 24,
            margin: 1e-10,
        }
    }
}

/// Mountain-pass driver returning the report and the profile scanned between the witnesses.
pub fn mountain_pass_with_profile(
    model: &FunctionalModel,
    scan: &ScanOptions,
    critical: &CriticalOptions,
    opts: &MountainPassOptions,
) -> Result<(CriticalReport, EnergyProfile)> {
    let level = &scan.level;
    let (j0, _) = zeta_eval(model, 0.0, level, None)?;

    let mut rho_hit: Option<EnergySample> = None;
    let mut tried = Vec::new();
    for &rho in &opts.rho_grid {
        let s = sample_at(model, rho, level, None)?;
        tried.push(format!("zeta({rho:.3e}) = {:.6e}", s.zeta));
        if s.zeta > j0 + opts.margin {
            rho_hit = Some(s);
            break;
        }
    }
    let rho_sample = rho_hit.ok_or_else(|| Error::Geometry {
        witness: GeometryWitness::SmallLevel,
        detail: format!("J(0) = {j0:.6e}; {}", tried.join(", ")),
    })?;
    let (rho, alpha) = (rho_sample.r, rho_sample.zeta);

    let mut big_r = 2.0 * rho;
    let mut warm = rho_sample.detail.maximizer.clone();
    let far = loop {
        if big_r > opts.r_cap {
            return Err(Error::Geometry {
                witness: GeometryWitness::FarLevel,
                detail: format!(
                    "zeta stayed at or above alpha = {alpha:.6e} up to R = {:.3e} (cap {:.3e})",
                    big_r / 2.0,
                    opts.r_cap
                ),
            });
        }
        let s = sample_at(model, big_r, level, Some(&warm))?;
        if s.zeta < alpha {
            break s;
        }
        warm = s.detail.maximizer.clone();
        big_r *= 2.0;
    };
    let jw = far.zeta;

    let radii = geometric_grid(rho, big_r, opts.scan_density.max(3));
    let mut profile = scan_profile(model, &radii, scan)?;
    profile.insert(rho_sample);
    profile.insert(far.clone());

    let mut report = locate_critical(model, &profile, level, critical)?;
    let floor = j0.max(jw);
    if !(report.c_star > floor + opts.margin) {
        return Err(Error::Geometry {
            witness: GeometryWitness::FarLevel,
            detail: format!(
                "located level {:.6e} does not exceed max(J(0), J(w)) = {floor:.6e}",
                report.c_star
            ),
        });
    }
    report.witness = Some(MountainPassWitness {
        rho,
        alpha,
        big_r,
        j0,
        jw,
        w_description: format!(
            "energy-maximum-type point on the level Psi = {big_r:.6e} (start {}), J(w) = {jw:.6e}",
            far.detail.start_index
        ),
    });
    Ok((report, profile))
}

pub fn mountain_pass_solve(
    model: &FunctionalModel,
    scan: &ScanOptions,
    critical: &CriticalOptions,
    opts: &MountainPassOptions,
) -> Result<CriticalReport> {
    mountain_pass_with_profile(model, scan, critical, opts).map(|(r, _)| r)
}

/// `J'(tu)(tu) = Psi'(tu)(tu) - Phi'(tu)(tu)`.
fn nehari_function(model: &FunctionalModel, u: &[f64], t: f64) -> f64 {
    let tu: Vec<f64> = u.iter().map(|x| t * x).collect();
    model.psi_dderiv(&tu, &tu) - model.phi_dderiv(&tu, &tu)
}

/// Smallest `t > 0` on a log-spaced scan with `tu` on the Nehari set `{J'(u)u = 0}`.
pub fn nehari_scale(model: &FunctionalModel, u: &[f64]) -> Result<f64> {
    model.check(u)?;
    let t0 = crate::spheremax::scale_to_level(model, u, 1.0)?;
    let ts: Vec<f64> = (-48..=48).map(|k| t0 * 10f64.powf(k as f64 / 8.0)).collect();
    let mut prev = (ts[0], nehari_function(model, u, ts[0]));
    for &t in &ts[1..] {
        let g = nehari_function(model, u, t);
        if g == 0.0 {
            return Ok(t);
        }
        if prev.1 != 0.0 && g.signum() != prev.1.signum() {
            let (mut lo, mut hi) = (prev.0, t);
            let sign_lo = prev.1.signum();
            while hi - lo > 1e-13 * hi {
                let mid = 0.5 * (lo + hi);
                let gm = nehari_function(model, u, mid);
                if gm == 0.0 {
                    return Ok(mid);
                }
                if gm.signum() == sign_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        prev = (t, g);
    }
    Err(Error::NoNehariRoot)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NehariSample {
    pub min: f64,
    pub evaluated: usize,
    pub skipped: usize,
}

/// Minimum of `J` over the Nehari points of the given directions.
pub fn nehari_min_over(model: &FunctionalModel, directions: &[Field]) -> Result<NehariSample> {
    let mut min = f64::INFINITY;
    let (mut evaluated, mut skipped) = (0, 0);
    for d in directions {
        match nehari_scale(model, d) {
            Ok(t) => {
                min = min.min(model.energy(&d.scaled(t)));
                evaluated += 1;
            }
            Err(Error::NoNehariRoot) | Err(Error::InvalidArgument(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if evaluated == 0 {
        return Err(Error::NehariEmpty);
    }
    Ok(NehariSample {
        min,
        evaluated,
        skipped,
    })
}

/// `k` seeded smooth directions, plus `include` when given.
pub fn nehari_sample_min(
    model: &FunctionalModel,
    k: usize,
    seed: u64,
    include: Option<&Field>,
) -> Result<NehariSample> {
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one direction".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dirs: Vec<Field> = include.into_iter().cloned().collect();
    dirs.extend((0..k).map(|_| random_smooth_field(model.grid(), &mut rng)));
    nehari_min_over(model, &dirs)
}
