//! Config-driven runs of the energy-function solver: `scan`, `solve`, `eig`, `verify`.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

pub use commands::{execute, Command, Outcome};
pub use config::RunConfig;
pub use presets::{preset, PRESETS};

use zeta_core::Error;

/// Process exit status for a failed run: 2 when the mountain-pass geometry was not witnessed.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(Error::Geometry { .. }) => 2,
        _ => 1,
    }
}
