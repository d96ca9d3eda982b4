//! Anomaly flow on three-dimensional unimodular complex Lie groups.
//!
//! Left-invariant Hermitian metrics on a complex Lie group are constant
//! positive-definite Hermitian 3x3 matrices in a frame of left-invariant
//! holomorphic vector fields, so the flow of (2,2)-forms
//! `d/dt (|Omega| omega^2) = i ddbar omega - (alpha'/4) Tr(Rm ^ Rm)` becomes an
//! ODE on nine real coordinates. This crate holds the pure numerics:
//!
//! * [`algebra`]: structure constants, the catalog of the four unimodular
//!   groups, Jacobi and unimodularity checks, changes of frame.
//! * [`geometry`]: metrics, `|Omega|`, `i d omega`, `i ddbar omega`, `d omega^2`.
//! * [`curvature`]: the curvature of the Gauduchon line of connections and the
//!   anomaly (2,2)-form.
//! * [`flow`]: the metric ODE, fixed-step and adaptive integrators with event
//!   detection, conserved-quantity monitors.
//! * [`analysis`]: stationary points, linearization spectra and closed-form
//!   solutions for the individual groups.
//!
//! The crate is `no_std` (it needs `alloc`). Enable the `std` feature to get
//! `std::error::Error` on [`Error`].
#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod algebra;
pub mod analysis;
pub mod curvature;
mod error;
pub mod flow;
pub mod geometry;
pub mod linalg;
pub(crate) mod math;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Default absolute tolerance for validation checks.
pub const DEFAULT_TOL: f64 = 1e-12;
