//! The run document: one TOML file per experiment.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use zeta_core::energy::{geometric_grid, linear_grid};
use zeta_core::{CriticalOptions, LevelMaxOptions, ModelSpec, MountainPassOptions, ScanOptions};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema_version: u32,
    pub model: ModelSpec,
    pub scan: ScanSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub critical: CriticalOptions,
    #[serde(default)]
    pub mountain_pass: MountainPassSpec,
    #[serde(default)]
    pub verify: VerifySpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Geometric,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl ScanSpec {
    pub fn radii(&self) -> Vec<f64> {
        match self.spacing {
            Spacing::Geometric => geometric_grid(self.r_min, self.r_max, self.samples),
            Spacing::Linear => linear_grid(self.r_min, self.r_max, self.samples),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    #[serde(default = "yes")]
    pub warm_start: bool,
    #[serde(flatten)]
    pub level: LevelMaxOptions,
}

fn yes() -> bool {
    true
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            warm_start: true,
            level: LevelMaxOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MountainPassSpec {
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_samples: usize,
    pub r_cap: f64,
    pub scan_density: usize,
    pub margin: f64,
}

impl Default for MountainPassSpec {
    fn default() -> Self {
        Self {
            rho_min: 1e-3,
            rho_max: 10.0,
            rho_samples: 9,
            r_cap: 1e7,
            scan_density: 24,
            margin: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifySpec {
    /// Central-difference step for `zeta'`, relative to `r`.
    pub fd_delta_rel: f64,
    /// Random directions for the functional-derivative checks.
    pub fd_trials: usize,
    /// Random directions in the Nehari sample reported by `solve`.
    pub nehari_k: usize,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            fd_delta_rel: 1e-4,
            fd_trials: 8,
            nehari_k: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputSpec {
    pub directory: PathBuf,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).context("config does not parse")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            bail!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            );
        }
        let s = &self.scan;
        if !(s.r_min > 0.0) || !(s.r_max > s.r_min) || !s.r_max.is_finite() {
            bail!("scan needs 0 < r_min < r_max, got [{}, {}]", s.r_min, s.r_max);
        }
        if s.samples < 2 {
            bail!("scan needs at least 2 samples, got {}", s.samples);
        }
        let l = &self.solver.level;
        let c = &self.critical;
        let v = &self.verify;
        let tolerances = [
            ("tol_stat", l.tol_stat),
            ("tol_level", l.tol_level),
            ("tol_multiplier", l.tol_multiplier),
            ("phi_slack", l.phi_slack),
            ("tol_crit", c.tol_crit),
            ("tol_res", c.tol_res),
            ("fd_delta_rel", v.fd_delta_rel),
            ("margin", self.mountain_pass.margin),
        ];
        for (name, t) in tolerances {
            if !(t > 0.0) || !t.is_finite() {
                bail!("{name} must be positive, got {t}");
            }
        }
        if l.starts == 0 || l.max_iter == 0 {
            bail!("solver needs at least one start and one iteration");
        }
        let mp = &self.mountain_pass;
        if !(mp.rho_min > 0.0) || !(mp.rho_max >= mp.rho_min) || mp.rho_samples == 0 || !(mp.r_cap > mp.rho_max) {
            bail!("mountain_pass needs 0 < rho_min <= rho_max < r_cap and rho_samples >= 1");
        }
        if mp.scan_density < 3 {
            bail!("mountain_pass.scan_density must be at least 3");
        }
        Ok(())
    }

    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions {
            level: self.solver.level.clone(),
            warm_start: self.solver.warm_start,
        }
    }

    pub fn mountain_pass_options(&self) -> MountainPassOptions {
        let mp = &self.mountain_pass;
        MountainPassOptions {
            rho_grid: geometric_grid(mp.rho_min, mp.rho_max, mp.rho_samples),
            r_cap: mp.r_cap,
            scan_density: mp.scan_density,
            margin: mp.margin,
        }
    }

    pub fn level_options(&self) -> &LevelMaxOptions {
        &self.solver.level
    }
}
