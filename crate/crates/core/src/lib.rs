//! Radially symmetric (disk) and cylindrically symmetric compressible MHD
//! with an interior vacuum: a finite-difference solver, vacuum-front
//! tracking, and the diagnostics that bound the lifespan of smooth solutions.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod crossval;
pub mod diagnostics;
pub mod error;
pub mod free_boundary;
pub mod grid;
pub mod harness;
pub mod mms;
pub mod params;
pub mod presets;
pub mod profile;
pub mod scenario;
pub mod solver;
pub mod state;
pub mod vacuum;

pub use error::{Error, Result};
pub use grid::{integrate, l2_norm, make_grid, RadialGrid, Weight};
pub use params::{Geometry, PhysParams};
pub use profile::Profile;
pub use state::FluidState;
pub use config::{parse_config, ScenarioConfig};
pub use harness::{run, RunOutcome, RunStatus, Runner};
