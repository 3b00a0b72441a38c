//! Critical points of `J = Psi - Phi` on discretised function spaces through
//! the energy function `zeta(r) = r - max { Phi(u) : Psi(u) = r }`.
//!
//! The pipeline: build a [`grid::Grid`], pair a `Psi` with a `Phi` in a
//! [`models::FunctionalModel`], maximise `Phi` on level sets of `Psi`
//! ([`spheremax`]), scan `zeta` and refine a zero of `zeta'` ([`energy`]).
//! [`eigen`] and [`verify`] supply the reference quantities and the checks.

pub mod eigen;
pub mod energy;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod models;
pub mod spheremax;
pub mod verify;

pub use energy::{
    locate_critical, mountain_pass_solve, mountain_pass_with_profile, scan_profile, zeta_derivative, zeta_eval,
    CriticalOptions, CriticalReport, EnergyProfile, EnergySample, MountainPassOptions, ScanOptions,
};
pub use error::{Error, GeometryWitness, Result};
pub use grid::{build_grid, Field, Grid, GridKind, GridSpec};
pub use models::{
    make_model, Family, FunctionalModel, ModelSpec, NonlinearitySpec, PsiSpec, ScalarFieldSpec, Truncation,
};
pub use spheremax::{maximize_on_level, LevelMaxOptions, LevelMaxResult};
