//! Numerical model of a single-shot displacement receiver for quaternary
//! phase-shift-keyed (QPSK) coherent states.
//!
//! The receiver splits the input state into three detection arms. Each arm
//! applies a displacement that tests one hypothesis of the input phase and
//! feeds an on/off single-photon detector; the joint click record over the
//! three arms selects the most likely input state by a maximum a posteriori
//! (MAP) rule. This crate provides:
//!
//! - [`model`]: the per-arm click statistics with realistic imperfections
//!   (detection efficiency, dark counts, interference visibility), the MAP
//!   decision rule, and exact error-probability evaluation by outcome
//!   enumeration;
//! - [`bounds`]: the Helstrom bound and the ideal-heterodyne limit (QNL)
//!   for the four-state constellation;
//! - [`optimizer`]: displacement- and splitting-ratio optimization and
//!   error-probability curves over photon-number grids;
//! - [`montecarlo`]: seeded trial-by-trial simulation that cross-validates
//!   the exact enumeration;
//! - [`calibration`]: the wave-plate interference fringe model, fringe
//!   fitting, visibility extraction and the half-wave-plate angle solver
//!   used to realize a target displacement ratio.
//!
//! All operations are pure functions of their inputs and safe to call from
//! multiple threads.

pub mod bounds;
pub mod calibration;
mod error;
pub mod model;
pub mod montecarlo;
mod optim;
pub mod optimizer;

pub use error::{Error, Result};
pub use model::{
    exact_error_probability, map_decision, Alphabet, ArmConfig, Outcome, ReceiverConfig,
};
pub use optimizer::{optimize_displacements, optimize_splitting, ArmImperfections};
