//! Core library for MAX-K-LIN-2 experiments: instance generation and
//! evaluation, solution combining on line restrictions, the randomized
//! classical solver with its improve-or-witness duality, brute-force ground
//! truth, and an exact statevector simulator of the transverse-field quench.
//!
//! ```
//! use maxklin_core::classical::{run_amplified, RunConfig};
//! use maxklin_core::oracle::brute_force_optimum;
//! use maxklin_core::Instance;
//!
//! let inst = Instance::random_regular(18, 3, 4, 7)?;
//! let run = run_amplified(&inst, &RunConfig::new(&inst, 1.0, 42))?;
//! let truth = brute_force_optimum(&inst, 24)?;
//! assert!(run.best().rounded_energy > 0);
//! assert!(run.best().rounded_energy <= truth.max_energy);
//! # Ok::<(), maxklin_core::Error>(())
//! ```

pub mod classical;
pub mod error;
pub mod instance;
pub mod oracle;
pub mod polycombine;
pub mod quench;
pub mod rng;

pub use error::{Error, Result};
pub use instance::{round_randomized, Assignment, FractionalAssignment, Instance, Term};

/// Crate version embedded in output artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
