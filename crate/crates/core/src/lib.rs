//! Kicked transverse-field Ising dynamics on qubit coupling graphs.
//!
//! The central engine is a dissipative mean-field map: each qubit is a Bloch
//! vector, neighbours enter through a self-consistent average field, and their
//! fluctuations are folded in as a dephasing channel. Around it sit an exact
//! statevector reference for small graphs, a Monte Carlo check of the dephasing
//! channel, and the analytic decay law near the Clifford point.
//!
//! Parallel kernels use rayon when the `parallel` feature is on (the default);
//! results are bit-identical either way.

pub mod angle;
mod error;
pub mod exact;
pub mod inhomogeneous;
pub mod meanfield;
pub mod par;
pub mod qubit_state;
pub mod report;
pub mod stabilizer;
pub mod stochastic;
pub mod sweep;
pub mod topology;

pub use error::{Error, Result};
