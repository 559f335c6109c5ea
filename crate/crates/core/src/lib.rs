//! Selective population transfer in a Y-type four-level atom driven by a
//! single tanh-chirped few-cycle pulse, simulated without the rotating-wave
//! approximation.
//!
//! Module map:
//! - [`pulse`]: envelope, chirp phase, coupling, instantaneous frequency
//! - [`levels`]: the four-level atom and its Hamiltonian
//! - [`propagator`]: density-matrix, state-vector and exponential propagators
//! - [`sweep`]: 1D/2D parameter scans of final populations
//! - [`cli`]: configuration files, commands and output formatting

pub mod cli;
pub mod error;
pub mod levels;
pub mod propagator;
pub mod pulse;
pub mod sweep;

pub use error::{Error, Result};
pub use levels::{Hamiltonian, LevelSystem};
pub use propagator::{
    final_populations, propagate, propagate_state, propagate_unitary, rhs, DensityMatrix, Method,
    SimulationConfig, StateSeries, TimeSeries,
};
pub use pulse::ChirpedPulse;
pub use sweep::{sweep, AxisSpec, SweepGrid, SweepParameter};
