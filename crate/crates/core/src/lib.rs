//! One-dimensional strong-field pump-probe simulator.
//!
//! Solves the time-dependent Schrödinger equation for a soft-core model
//! atom in a laser pulse, builds four families of laser-dressed bound
//! states on top of the field-free spectrum, and predicts probe-induced
//! bound-bound transitions in first-order perturbation theory, with full
//! two-pulse grid solutions available as the reference.

pub mod config;
pub mod dressed;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod linalg;
pub mod output;
pub mod probe;
pub mod propagator;
pub mod pulses;
pub mod spectrum;

pub use error::{Error, Result};
pub use grid::{build_grid, soft_core_potential, Grid, Potential, Wavefunction};
pub use pulses::PulseParams;
pub use spectrum::{bound_states, BoundBasis};
