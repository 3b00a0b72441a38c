//! Named configurations referenced by the acceptance tests.

use anyhow::{bail, Result};
use zeta_core::eigen::first_eigenvalue;
use zeta_core::{build_grid, Family, GridSpec, ModelSpec, NonlinearitySpec, PsiSpec, ScalarFieldSpec, Truncation};

use crate::config::{RunConfig, ScanSpec, Spacing, SCHEMA_VERSION};

pub const PRESETS: [&str; 5] = ["lin_half", "pow4", "logcos", "bl_radial", "aniso"];

fn unit_interval(n: usize) -> GridSpec {
    GridSpec::Interval { a: 0.0, b: 1.0, n }
}

fn nonlinearity(family: Family) -> NonlinearitySpec {
    NonlinearitySpec {
        family,
        truncation: Truncation::ZeroBelow,
        coefficient: None,
    }
}

fn config(grid: GridSpec, psi: PsiSpec, family: Family, r_min: f64, r_max: f64) -> RunConfig {
    RunConfig {
        schema_version: SCHEMA_VERSION,
        model: ModelSpec {
            grid,
            psi,
            nonlinearity: nonlinearity(family),
            alpha: None,
            eta: None,
        },
        scan: ScanSpec {
            r_min,
            r_max,
            samples: 12,
            spacing: Spacing::Geometric,
        },
        solver: Default::default(),
        critical: Default::default(),
        mountain_pass: Default::default(),
        verify: Default::default(),
        output: Default::default(),
    }
}

/// Builds the named preset. `lin_half` solves for the discrete first eigenvalue of its grid.
pub fn preset(name: &str) -> Result<RunConfig> {
    let cfg = match name {
        "lin_half" => {
            let grid = unit_interval(255);
            let g = build_grid(&grid)?;
            let lambda1 = first_eigenvalue(&g, &vec![1.0; g.len()], None)?.lambda1;
            config(
                grid,
                PsiSpec::Semilinear,
                Family::Linear { lambda: 0.5 * lambda1 },
                1e-2,
                1e2,
            )
        }
        "pow4" => config(
            unit_interval(255),
            PsiSpec::Semilinear,
            Family::Power { p: 4.0 },
            1.0,
            100.0,
        ),
        "logcos" => config(unit_interval(255), PsiSpec::Semilinear, Family::LogCos, 1e-2, 1e5),
        "bl_radial" => config(
            GridSpec::Radial {
                r_max: 20.0,
                dim: 3,
                n: 255,
            },
            PsiSpec::SchrodingerRadial {
                potential: ScalarFieldSpec::Ratio { k1: 0.5, k2: 1.0 },
                v0: None,
                v_inf: None,
            },
            Family::Power { p: 4.0 },
            1e-2,
            1e2,
        ),
        "aniso" => config(
            GridSpec::Rectangle {
                x0: 0.0,
                x1: 1.0,
                y0: 0.0,
                y1: 1.0,
                nx: 15,
                ny: 15,
            },
            PsiSpec::Anisotropic {
                exponents: vec![1.5, 3.0],
            },
            Family::Power { p: 2.5 },
            1e-1,
            1e2,
        ),
        other => bail!("unknown preset {other:?}; known: {}", PRESETS.join(", ")),
    };
    cfg.validate()?;
    Ok(cfg)
}
