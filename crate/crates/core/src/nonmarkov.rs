//! Punctual non-Markovianity of the QBM channel.
//!
//! The channel is CP-divisible at `t` when the intermediate map
//! `(X(t+eps, t), Y(t+eps, t))` is completely positive, i.e. when
//! `Y - (i/2) Omega + (i/2) X Omega X^T >= 0`. The measure is the normalised
//! weight of the negative part of that matrix's spectrum.

use nalgebra::{Complex, Matrix2};

use crate::channel::{channel_pair, omega, ChannelPair, CoefficientGrid};
use crate::error::{Error, Result};
use crate::numerics::eig_hermitian_2x2;

/// Default time increment for the intermediate map.
pub const DEFAULT_EPS: f64 = 1e-4;

/// Closed-form measure `(1/2) [1 - delta / sqrt(delta^2 + gamma^2 + pi^2)]`.
///
/// Returns `0` when all three coefficients vanish.
pub fn np_closed_form(gamma: f64, delta: f64, pi: f64) -> f64 {
    let norm = (delta * delta + gamma * gamma + pi * pi).sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    (0.5 * (1.0 - delta / norm)).clamp(0.0, 1.0)
}

/// Evolution between `t` and `t + eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntermediateMap {
    pub pair: ChannelPair,
    pub t: f64,
    pub eps: f64,
}

/// Builds the intermediate map so that composing `(0 -> t)` with
/// `(t -> t + eps)` reproduces `(0 -> t + eps)`:
/// `X(t+eps, t) = X(t+eps, 0) X(t, 0)^{-1}` and
/// `Y(t+eps, t) = Y(t+eps, 0) - X(t+eps, t) Y(t, 0) X(t+eps, t)^T`.
pub fn intermediate_map(grid: &CoefficientGrid, t: f64, eps: f64) -> Result<IntermediateMap> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be non-negative, got {t}")));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {eps}")));
    }
    let early = channel_pair(grid, t)?;
    let late = channel_pair(grid, t + eps)?;
    let early_inv = early
        .x_mat
        .try_inverse()
        .ok_or_else(|| Error::Numeric(format!("channel matrix X(t = {t}) is singular")))?;
    let x = late.x_mat * early_inv;
    let y = late.y_mat - x * early.y_mat * x.transpose();
    let y = 0.5 * (y + y.transpose());
    Ok(IntermediateMap {
        pair: ChannelPair {
            x_mat: x,
            y_mat: y,
            tau: eps,
        },
        t,
        eps,
    })
}

/// `Y - (i/2) Omega + (i/2) X Omega X^T` for the intermediate map.
pub fn cp_matrix(im: &IntermediateMap) -> Matrix2<Complex<f64>> {
    let x = im.pair.x_mat;
    let om = omega();
    let imag = (x * om * x.transpose() - om) * 0.5;
    Matrix2::from_fn(|i, j| Complex::new(im.pair.y_mat[(i, j)], imag[(i, j)]))
}

/// `(1/2) sum(|l| - l) / sum |l|` over the eigenvalues of a CP matrix.
pub fn negative_weight(eigenvalues: (f64, f64)) -> f64 {
    let (a, b) = eigenvalues;
    let total = a.abs() + b.abs();
    if total == 0.0 {
        return 0.0;
    }
    (0.5 * ((a.abs() - a) + (b.abs() - b)) / total).clamp(0.0, 1.0)
}

/// Spectral measure at finite `eps`. Zero at `t = 0`, where the channel is
/// the identity.
pub fn np_spectral(grid: &CoefficientGrid, t: f64, eps: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let im = intermediate_map(grid, t, eps)?;
    Ok(negative_weight(eig_hermitian_2x2(&cp_matrix(&im))?))
}

/// Richardson extrapolation `2 N(eps/2) - N(eps)` of [`np_spectral`].
pub fn np_spectral_extrapolated(grid: &CoefficientGrid, t: f64, eps: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    let coarse = np_spectral(grid, t, eps)?;
    let fine = np_spectral(grid, t, 0.5 * eps)?;
    Ok((2.0 * fine - coarse).clamp(0.0, 1.0))
}

/// Closed-form measure evaluated from the grid coefficients at `t`.
pub fn np_from_grid(grid: &CoefficientGrid, t: f64) -> Result<f64> {
    let c = grid.coefficients(t)?;
    Ok(np_closed_form(c.gamma, c.delta, c.pi))
}
