//! Stationary points, linearization, and closed-form solutions of the flow.

mod eigen;
mod oracles;
mod stationary;

pub use eigen::{eigen_residual, eigenvalues};
pub use oracles::{
    blow_up_time, nilpotent_diagonal_oracle, nilpotent_diagonal_slope, sl2c_diagonal_rhs, sl2c_isotropic_constant,
    sl2c_isotropic_oracle, solvable_invariants, solvable_reduced_oracle,
};
pub use stationary::{
    classify_solvable_stationary, classify_stability, find_stationary, jacobian, spectrum, SpectrumReport, Stability,
    StationaryClass, StationaryReport, MIN_CONDITION, SPECTRAL_TOL,
};
