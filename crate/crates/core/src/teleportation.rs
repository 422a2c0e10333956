//! Braunstein-Kimble teleportation of coherent states with a lossy Bell
//! measurement and the resource's second mode sent through the QBM channel.

use std::f64::consts::{PI, TAU};

use nalgebra::Matrix2;

use crate::channel::{apply_channel_mode2, channel_pair, CoefficientGrid};
use crate::error::{Error, Result};
use crate::gaussian::{
    gaussian_fidelity_coherent, log_negativity, pt_symplectic_eig_min, tmsv_covariance,
    SingleModeCov,
};

/// Resource squeezing and Bell-measurement settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams {
    /// Squeezing amplitude.
    pub r: f64,
    /// Squeezing phase in radians.
    pub phi: f64,
    /// Beam-splitter transmissivity `T` in `(0, 1]`.
    pub transmissivity: f64,
    /// Gain of the classical channel.
    pub gain: f64,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        let t = 0.9f64.sqrt();
        Self {
            r: 2.0,
            phi: PI,
            transmissivity: t,
            gain: 1.0 / t,
        }
    }
}

impl ProtocolParams {
    /// Protocol with the unity-gain convention `g = 1 / T`.
    pub fn new(r: f64, phi: f64, transmissivity: f64) -> Result<Self> {
        Self::with_gain(r, phi, transmissivity, 1.0 / transmissivity)
    }

    pub fn with_gain(r: f64, phi: f64, transmissivity: f64, gain: f64) -> Result<Self> {
        let p = Self {
            r,
            phi,
            transmissivity,
            gain,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(Error::Validation(format!(
                "squeezing amplitude must be non-negative, got {}",
                self.r
            )));
        }
        if !self.phi.is_finite() {
            return Err(Error::Validation("phase must be finite".to_string()));
        }
        if !(self.transmissivity > 0.0 && self.transmissivity <= 1.0) {
            return Err(Error::Validation(format!(
                "transmissivity must lie in (0, 1], got {}",
                self.transmissivity
            )));
        }
        if !(self.gain > 0.0 && self.gain.is_finite()) {
            return Err(Error::Validation(format!(
                "gain must be positive, got {}",
                self.gain
            )));
        }
        Ok(())
    }

    /// `R = sqrt(1 - T^2)`.
    pub fn reflectivity(&self) -> f64 {
        (1.0 - self.transmissivity * self.transmissivity)
            .max(0.0)
            .sqrt()
    }

    pub fn with_phi(self, phi: f64) -> Self {
        Self { phi, ..self }
    }
}

/// Covariance of Bob's output after a transit time `dtau`.
pub fn output_covariance(
    pp: &ProtocolParams,
    grid: &CoefficientGrid,
    dtau: f64,
) -> Result<SingleModeCov> {
    pp.validate()?;
    let c = grid.coefficients(dtau)?;
    let x = grid.params().x;
    let (t, g, refl) = (pp.transmissivity, pp.gain, pp.reflectivity());
    let (ch, sh) = ((2.0 * pp.r).cosh(), (2.0 * pp.r).sinh());
    let eg = c.big_gamma.exp();
    let bracket = eg * g * g * (t * t * ch + 2.0 * refl * refl + t * t)
        + 2.0 * eg.sqrt() * g * t * sh * (pp.phi - dtau / x).cos()
        + ch;
    let scalar = 0.5 * bracket / eg;
    SingleModeCov::new(Matrix2::identity() * scalar + c.wbar * 2.0)
}

/// Fidelity from the determinant of `sigma_in + sigma_out`.
pub fn fidelity_det(pp: &ProtocolParams, grid: &CoefficientGrid, dtau: f64) -> Result<f64> {
    gaussian_fidelity_coherent(&output_covariance(pp, grid, dtau)?)
}

/// Closed-form fidelity in terms of `Gamma`, `W` and the `Lambda_jj`
/// coefficients. Assumes unity gain `g = 1 / T`; `pp.gain` is ignored.
pub fn fidelity_closed_form(pp: &ProtocolParams, grid: &CoefficientGrid, dtau: f64) -> Result<f64> {
    pp.validate()?;
    let c = grid.coefficients(dtau)?;
    let x = grid.params().x;
    let t = pp.transmissivity;
    let refl = pp.reflectivity();
    let (ch, sh) = ((2.0 * pp.r).cosh(), (2.0 * pp.r).sinh());
    let eg = c.big_gamma.exp();
    let lambda = |wjj: f64| {
        ch + eg * (2.0 + 4.0 * wjj + 2.0 * refl * refl / (t * t) + ch)
            + 2.0 * eg.sqrt() * (pp.phi - dtau / x).cos() * sh
    };
    let w = c.wbar;
    let radicand =
        -4.0 * w[(0, 1)] * w[(0, 1)] + 0.25 * lambda(w[(0, 0)]) * lambda(w[(1, 1)]) / (eg * eg);
    if !(radicand > 0.0) {
        return Err(Error::Numeric(format!(
            "non-positive fidelity radicand {radicand:.3e} at tau = {dtau}"
        )));
    }
    Ok(1.0 / radicand.sqrt())
}

/// Squeezing phase maximising the fidelity, `pi + dtau / x` reduced to
/// `[0, 2 pi)`.
pub fn optimal_phase(dtau: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    Ok((PI + dtau / x).rem_euclid(TAU))
}

/// Fidelity at the analytic optimal phase.
pub fn phase_optimized_fidelity(
    pp: &ProtocolParams,
    grid: &CoefficientGrid,
    dtau: f64,
) -> Result<f64> {
    let phi = optimal_phase(dtau, grid.params().x)?;
    fidelity_closed_form(&pp.with_phi(phi), grid, dtau)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseOptimum {
    pub phi: f64,
    pub fidelity: f64,
}

const SCAN_POINTS: usize = 513;
const PHASE_TOL: f64 = 1e-6;

/// Maximises the closed-form fidelity over the squeezing phase by a dense
/// scan followed by golden-section refinement. `pp.phi` is ignored.
pub fn optimize_phase_numeric(
    pp: &ProtocolParams,
    grid: &CoefficientGrid,
    dtau: f64,
) -> Result<PhaseOptimum> {
    let f = |phi: f64| fidelity_closed_form(&pp.with_phi(phi), grid, dtau);
    let step = TAU / (SCAN_POINTS - 1) as f64;
    let mut best = (0.0, f64::NEG_INFINITY);
    for j in 0..SCAN_POINTS - 1 {
        let phi = j as f64 * step;
        let v = f(phi)?;
        if v > best.1 {
            best = (phi, v);
        }
    }

    let inv_golden = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    let mut c = hi - inv_golden * (hi - lo);
    let mut d = lo + inv_golden * (hi - lo);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while hi - lo > PHASE_TOL {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_golden * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_golden * (hi - lo);
            fd = f(d)?;
        }
    }
    let phi = 0.5 * (lo + hi);
    let fidelity = f(phi)?;
    let (phi, fidelity) = if fidelity >= best.1 {
        (phi, fidelity)
    } else {
        best
    };
    Ok(PhaseOptimum {
        phi: phi.rem_euclid(TAU),
        fidelity,
    })
}

/// Logarithmic negativity of the resource after mode 2 spends `dtau` in the
/// channel.
pub fn resource_entanglement(r: f64, phi: f64, grid: &CoefficientGrid, dtau: f64) -> Result<f64> {
    let sigma = tmsv_covariance(r, phi)?;
    let evolved = apply_channel_mode2(&sigma, &channel_pair(grid, dtau)?)?;
    let nu = pt_symplectic_eig_min(&evolved)?;
    if nu == 0.0 {
        return Err(Error::Numeric(format!(
            "vanishing symplectic eigenvalue at tau = {dtau}"
        )));
    }
    log_negativity(nu)
}

/// Smallest distance between two angles on the circle.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}
