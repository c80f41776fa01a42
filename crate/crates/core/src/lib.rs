//! Simulation and analysis of biphoton spectra from chirped
//! quasi-phase-matched multilayer stacks.
//!
//! Spontaneous parametric down-conversion in a one-dimensional chi^(2) stack
//! is modeled as a coherent sum of per-layer amplitudes; for linearly
//! chirped stacks that sum is a discrete Gauss sum with closed forms for the
//! photonic (index-chirped), aperiodically poled, and strictly periodic
//! configurations. On top of the amplitude engine the crate provides grid
//! spectra with wavelength mapping, analytic line prediction and numeric
//! peak detection, support and bandwidth estimators, chirp sweeps and a
//! bandwidth optimizer, and a Gauss-sum number-factorization demonstrator
//! with the parameter map that realizes those sums in a physical stack.
//!
//! Everything is pure and deterministic: grid points, sweep rows, and trial
//! divisors may be evaluated concurrently with results independent of
//! thread count.

pub mod engine;
pub mod error;
pub mod fixtures;
pub mod gaussfactor;
pub mod model;
pub mod optimize;
pub mod spectra;

pub use error::{Error, Result};
