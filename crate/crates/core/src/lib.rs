#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Two-colour evanescent-wave micro-traps for cold atoms above two crossed
//! suspended rib waveguides: mode model, trapping potential, trap analysis,
//! WKB tunnelling and photon scattering.

pub mod atomic_physics;
pub mod config;
pub mod constants;
pub mod error;
pub mod grid;
pub mod mode_model;
pub mod parallel;
pub mod potential;
pub mod quadrature;
pub mod report;
pub mod scattering;
pub mod slab_solver;
pub mod trap_analysis;
pub mod wkb;

pub use config::{load_config, load_preset, ConfigFile, PRESET_NAMES};
pub use error::{Result, TrapError};
pub use grid::{Axis, GridFormat, PotentialGrid};
pub use parallel::Execution;
pub use potential::{EnergySurface, Plane, ScanDirection, TrapConfig, TrapModel};
pub use report::{characterize, TrapReport};
pub use trap_analysis::{find_minimum, AnalysisSettings, TrapMinimum};
