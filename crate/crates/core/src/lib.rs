//! Quantum kicked top simulation with projective-measurement disturbance
//! analysis under the no-signalling-in-time (NSIT) condition.
//!
//! The crate is organized bottom-up:
//!
//! - [`spin`]: angular momentum generators, axis eigenbases, rotations.
//! - [`top`]: the Floquet operator `U = T R` and stroboscopic evolution.
//! - [`classical`]: the classical limit map and its stability analysis.
//! - [`measurement`]: projectors, dephasing, and outcome distributions.
//! - [`metrics`]: Hellinger distance, participation ratio, l1 coherence.
//! - [`experiments`]: batch runners behind the `kicktop` CLI.
//! - [`verify`]: numerical checks of the operator identities.

pub mod classical;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod measurement;
pub mod metrics;
pub mod spin;
pub mod top;
pub mod verify;

pub use classical::ClassicalPoint;
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use measurement::{DensityState, JointDistribution, OutcomeDistribution};
pub use metrics::{AveragedDistance, DistanceSample, Metric};
pub use spin::{Axis, AxisBasis, SpinSystem};
pub use top::{FloquetOperator, TopParams};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
