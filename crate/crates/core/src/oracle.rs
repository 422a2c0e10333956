//! Independent reference computations.
//!
//! These take a different route from the production code paths: explicit
//! matrix spectra instead of closed-form invariants, and analytic bath
//! kernels instead of frequency quadrature. The `check` suite compares the
//! two.

use nalgebra::{Matrix4, SymmetricEigen};

use crate::channel::QbmParams;
use crate::error::{Error, Result};
use crate::gaussian::two_mode_omega;
use crate::numerics::integrate_adaptive;

/// Symplectic eigenvalues `[nu_-, nu_+]` of the partial transpose (mode 2)
/// of `sigma`, from the spectrum of `|i Omega sigma~|`.
pub fn pt_symplectic_spectrum(sigma: &Matrix4<f64>) -> Result<[f64; 2]> {
    let p = Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 1.0, -1.0));
    let pt = p * sigma * p;
    let eig = SymmetricEigen::new(pt);
    if eig.eigenvalues.min() <= 0.0 {
        return Err(Error::Validation(
            "partially transposed covariance is not positive definite".to_string(),
        ));
    }
    let sqrt = eig.eigenvectors
        * Matrix4::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
        * eig.eigenvectors.transpose();
    // sqrt(s) Omega sqrt(s) is antisymmetric and shares the spectrum of
    // i Omega s up to a factor i; K^T K carries nu^2 twice.
    let k = sqrt * two_mode_omega() * sqrt;
    let mut nu_sq: Vec<f64> = SymmetricEigen::new(k.transpose() * k)
        .eigenvalues
        .iter()
        .map(|v| v.max(0.0))
        .collect();
    nu_sq.sort_by(f64::total_cmp);
    Ok([nu_sq[0].sqrt(), nu_sq[3].sqrt()])
}

/// Ohmic sine kernel `int_0^inf w e^{-w} sin(wu) dw = 2u / (1 + u^2)^2`.
pub fn ohmic_sine_kernel(u: f64) -> f64 {
    2.0 * u / (1.0 + u * u).powi(2)
}

/// Ohmic cosine kernel `int_0^inf e^{-w} cos(wu) dw = 1 / (1 + u^2)`.
pub fn ohmic_cosine_kernel(u: f64) -> f64 {
    1.0 / (1.0 + u * u)
}

/// `(gamma, delta, pi)` at `tau` for an Ohmic bath, integrating the analytic
/// kernels once over time.
pub fn ohmic_coefficients(tau: f64, params: &QbmParams, tol: f64) -> Result<(f64, f64, f64)> {
    let x = params.x;
    let a2 = params.alpha * params.alpha;
    let g = integrate_adaptive(|u| ohmic_sine_kernel(u) * (u / x).sin(), 0.0, tau, tol)?;
    let d = integrate_adaptive(|u| ohmic_cosine_kernel(u) * (u / x).cos(), 0.0, tau, tol)?;
    let p = integrate_adaptive(|u| ohmic_cosine_kernel(u) * (u / x).sin(), 0.0, tau, tol)?;
    let diff = 2.0 * params.theta * a2;
    Ok((a2 * g, diff * d, diff * p))
}
