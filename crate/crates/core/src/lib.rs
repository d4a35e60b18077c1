//! Nonlinear librational mode of an optically levitated prolate nanoparticle.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] turns particle geometry, trap and environment into mode constants
//!   (trap frequency, Kerr nonlinearity, zero-point scales, damping, occupancy).
//! * [`steadystate`] solves the driven mean-field steady state, classifies
//!   linear stability and builds bistability diagrams.
//! * [`dynamics`] integrates the mean-field equation of motion and runs
//!   drive-ramp protocols that expose hysteresis.
//! * [`squeezing`] evaluates quadrature variances of the linearised
//!   fluctuation Hamiltonian, both in closed form and through an independent
//!   moment-equation integrator.
//!
//! All angular quantities are in rad/s. Conversions to Hz happen at the I/O
//! boundary only.
//!
//! Data-parallel loops (drive sweeps, oracle batches, angle grids) go through
//! [`exec::Execution`]; with the default `parallel` feature they run on rayon,
//! otherwise they fall back to a sequential iterator.

// `!(x > 0.0)` is used on purpose throughout: it rejects NaN along with the
// out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod cubic;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod model;
pub mod ode;
pub mod oracles;
pub mod squeezing;
pub mod steadystate;

pub use error::{Error, Result};
pub use exec::Execution;
