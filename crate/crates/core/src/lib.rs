//! Continuous-variable teleportation through a non-Markovian quantum Brownian
//! motion (QBM) channel.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: adaptive quadrature, cumulative integration on uniform
//!   grids, 2x2 Hermitian eigenvalues and cubic Hermite interpolation.
//! * [`channel`]: QBM master-equation coefficients, the tabulated
//!   [`CoefficientGrid`] and the one-mode Gaussian channel `(X, Y)`.
//! * [`gaussian`]: covariance matrices, fidelity with a coherent state,
//!   partial-transpose symplectic eigenvalue and logarithmic negativity.
//! * [`teleportation`]: the noisy Braunstein-Kimble protocol and its phase
//!   optimisation.
//! * [`nonmarkov`]: the punctual non-Markovianity measure, both in closed form
//!   and from the spectrum of the intermediate-map CP matrix.
//! * [`config`], [`sweep`] and [`check`]: the sweep driver used by the CLI.
//!
//! All quantities are dimensionless: times are `tau = omega_c * t`, rates are
//! in units of `omega_c`, and `hbar = k_B = 1`. Covariance matrices use the
//! convention in which the vacuum is `identity / 2`.

// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod check;
pub mod config;
mod error;
pub mod gaussian;
pub mod nonmarkov;
pub mod numerics;
pub mod oracle;
pub mod sweep;
pub mod teleportation;

pub use channel::{
    apply_channel_mode2, build_coefficient_grid, channel_pair, delta_coeff, gamma_coeff, pi_coeff,
    rotation, spectral_density, ChannelPair, CoefficientGrid, Coefficients, KernelQuadrature,
    QbmParams,
};
pub use config::{parse_config, SweepConfig};
pub use error::{Error, Result};
pub use gaussian::{
    gaussian_fidelity_coherent, log_negativity, pt_symplectic_eig_min, tmsv_covariance,
    SingleModeCov, TwoModeBlocks, TwoModeCov,
};
pub use nonmarkov::{
    cp_matrix, intermediate_map, np_closed_form, np_spectral, np_spectral_extrapolated,
    IntermediateMap,
};
pub use numerics::{cumulative_integral, eig_hermitian_2x2, integrate_adaptive, UniformGrid};
pub use sweep::{run_sweep, Table};
pub use teleportation::{
    fidelity_closed_form, fidelity_det, optimal_phase, optimize_phase_numeric, output_covariance,
    resource_entanglement, PhaseOptimum, ProtocolParams,
};

/// Re-exported so downstream crates can name matrix types without depending
/// on `nalgebra` directly.
pub use nalgebra::{Complex, Matrix2, Matrix4};

/// Fidelity achievable without shared entanglement when teleporting coherent
/// states.
pub const CLASSICAL_THRESHOLD: f64 = 0.5;
