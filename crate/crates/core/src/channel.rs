//! Quantum Brownian motion channel in dimensionless units.
//!
//! Times are `tau = omega_c t`, the non-Markovianity parameter is
//! `x = omega_c / omega_0` (so `omega_0 t = tau / x`), and the bath spectral
//! density is `J(w) = w^s e^{-w}` with `w = omega / omega_c`. In the
//! high-temperature limit `2N(w) + 1 -> 2 theta / w`.
//!
//! The weak-coupling coefficients are
//!
//! ```text
//! gamma(tau) = alpha^2          int_0^tau du S(u) sin(u/x)
//! delta(tau) = 2 theta alpha^2  int_0^tau du C(u) cos(u/x)
//! pi(tau)    = 2 theta alpha^2  int_0^tau du C(u) sin(u/x)
//! ```
//!
//! with the bath kernels `S(u) = int dw w^s e^{-w} sin(wu)` and
//! `C(u) = int dw w^{s-1} e^{-w} cos(wu)`.

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::gaussian::TwoModeCov;
use crate::numerics::{
    cumulative_integral, hermite_basis, integrate_adaptive, try_integrate_adaptive, UniformGrid,
};

/// Dimensionless channel configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QbmParams {
    /// Non-Markovianity parameter `omega_c / omega_0`.
    pub x: f64,
    /// Spectral exponent; `1` is Ohmic.
    pub s: f64,
    /// Temperature ratio `k_B T / (hbar omega_c)`.
    pub theta: f64,
    /// System-bath coupling constant.
    pub alpha: f64,
}

impl Default for QbmParams {
    fn default() -> Self {
        Self {
            x: 0.1,
            s: 1.0,
            theta: 100.0,
            alpha: 0.1,
        }
    }
}

impl QbmParams {
    pub fn new(x: f64, s: f64, theta: f64, alpha: f64) -> Result<Self> {
        let p = Self { x, s, theta, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Validation(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("x", self.x)?;
        positive("s", self.s)?;
        positive("theta", self.theta)?;
        positive("alpha", self.alpha)?;
        if self.alpha > 0.5 {
            return Err(Error::Validation(format!(
                "alpha = {} is outside the weak-coupling range (<= 0.5)",
                self.alpha
            )));
        }
        if self.alpha > 0.2 {
            log::warn!(
                "alpha = {} is large for a weak-coupling expansion",
                self.alpha
            );
        }
        Ok(())
    }

    /// Whether the high-temperature substitution used for the diffusion
    /// coefficients is justified (`theta >= 1`).
    pub fn is_high_temperature(&self) -> bool {
        self.theta >= 1.0
    }
}

/// Truncation and tolerance for the inner frequency integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelQuadrature {
    /// Upper limit replacing the infinite frequency range.
    pub omega_max: f64,
    /// Absolute tolerance of each adaptive quadrature.
    pub tol: f64,
}

impl Default for KernelQuadrature {
    fn default() -> Self {
        Self {
            omega_max: 50.0,
            tol: crate::numerics::DEFAULT_TOL,
        }
    }
}

/// `J(w) = w^s e^{-w}` in units of `omega_c`.
pub fn spectral_density(omega: f64, s: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::Domain(format!(
            "frequency must be non-negative, got {omega}"
        )));
    }
    if omega == 0.0 {
        return Ok(0.0);
    }
    Ok(omega.powf(s) * (-omega).exp())
}

/// `S(u) = int_0^W dw w^s e^{-w} sin(w u)`.
pub fn sine_kernel(u: f64, s: f64, quad: &KernelQuadrature) -> Result<f64> {
    if u == 0.0 {
        return Ok(0.0);
    }
    integrate_adaptive(
        |w| {
            if w == 0.0 {
                0.0
            } else {
                w.powf(s) * (-w).exp() * (w * u).sin()
            }
        },
        0.0,
        quad.omega_max,
        quad.tol,
    )
}

/// `C(u) = int_0^W dw w^{s-1} e^{-w} cos(w u)`.
///
/// For `s < 1` the integrable singularity at `w = 0` is removed with the
/// substitution `w = v^{1/s}`.
pub fn cosine_kernel(u: f64, s: f64, quad: &KernelQuadrature) -> Result<f64> {
    if s < 1.0 {
        let inv = 1.0 / s;
        integrate_adaptive(
            |v| {
                let w = v.powf(inv);
                inv * (-w).exp() * (w * u).cos()
            },
            0.0,
            quad.omega_max.powf(s),
            quad.tol,
        )
    } else {
        integrate_adaptive(
            |w| {
                let weight = if s == 1.0 { 1.0 } else { w.powf(s - 1.0) };
                weight * (-w).exp() * (w * u).cos()
            },
            0.0,
            quad.omega_max,
            quad.tol,
        )
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau >= 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "tau must be non-negative, got {tau}"
        )))
    }
}

/// Damping coefficient `gamma(tau)` (units of `omega_c`), by nested quadrature.
pub fn gamma_coeff(tau: f64, params: &QbmParams) -> Result<f64> {
    gamma_coeff_with(tau, params, &KernelQuadrature::default())
}

pub fn gamma_coeff_with(tau: f64, params: &QbmParams, quad: &KernelQuadrature) -> Result<f64> {
    check_tau(tau)?;
    let x = params.x;
    let outer = try_integrate_adaptive(
        |u| Ok(sine_kernel(u, params.s, quad)? * (u / x).sin()),
        0.0,
        tau,
        quad.tol,
    )?;
    Ok(params.alpha * params.alpha * outer)
}

/// Normal diffusion coefficient `delta(tau)` (units of `omega_c`).
pub fn delta_coeff(tau: f64, params: &QbmParams) -> Result<f64> {
    delta_coeff_with(tau, params, &KernelQuadrature::default())
}

pub fn delta_coeff_with(tau: f64, params: &QbmParams, quad: &KernelQuadrature) -> Result<f64> {
    diffusion(tau, params, quad, f64::cos)
}

/// Anomalous diffusion coefficient `pi(tau)` (units of `omega_c`).
pub fn pi_coeff(tau: f64, params: &QbmParams) -> Result<f64> {
    pi_coeff_with(tau, params, &KernelQuadrature::default())
}

pub fn pi_coeff_with(tau: f64, params: &QbmParams, quad: &KernelQuadrature) -> Result<f64> {
    diffusion(tau, params, quad, f64::sin)
}

fn diffusion(
    tau: f64,
    params: &QbmParams,
    quad: &KernelQuadrature,
    phase: fn(f64) -> f64,
) -> Result<f64> {
    check_tau(tau)?;
    let x = params.x;
    let outer = try_integrate_adaptive(
        |u| Ok(cosine_kernel(u, params.s, quad)? * phase(u / x)),
        0.0,
        tau,
        quad.tol,
    )?;
    Ok(2.0 * params.theta * params.alpha * params.alpha * outer)
}

/// Free rotation `R(tau)` of the oscillator, angle `tau / x`.
pub fn rotation(tau: f64, x: f64) -> Result<Matrix2<f64>> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    let (s, c) = (tau / x).sin_cos();
    Ok(Matrix2::new(c, s, -s, c))
}

/// Symplectic form of one mode.
pub fn omega() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

/// Channel coefficients at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub gamma: f64,
    pub delta: f64,
    pub pi: f64,
    /// `Gamma(tau) = 2 int_0^tau gamma`.
    pub big_gamma: f64,
    pub wbar: Matrix2<f64>,
}

/// The channel's time dependence tabulated on a uniform `tau` axis.
///
/// Each tabulated quantity carries its exact `tau`-derivative at the nodes, so
/// off-node queries use cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct CoefficientGrid {
    params: QbmParams,
    gamma: UniformGrid,
    delta: UniformGrid,
    pi: UniformGrid,
    big_gamma: UniformGrid,
    wbar: Vec<Matrix2<f64>>,
    d_gamma: Vec<f64>,
    d_delta: Vec<f64>,
    d_pi: Vec<f64>,
    d_wbar: Vec<Matrix2<f64>>,
}

/// Tabulates the channel on `n` nodes over `[0, tau_max]`.
pub fn build_coefficient_grid(
    params: QbmParams,
    tau_max: f64,
    n: usize,
) -> Result<CoefficientGrid> {
    build_coefficient_grid_with(params, tau_max, n, &KernelQuadrature::default())
}

pub fn build_coefficient_grid_with(
    params: QbmParams,
    tau_max: f64,
    n: usize,
    quad: &KernelQuadrature,
) -> Result<CoefficientGrid> {
    params.validate()?;
    if n < 9 {
        return Err(Error::InvalidGrid(format!(
            "coefficient grid needs at least 9 nodes, got {n}"
        )));
    }
    if !(tau_max > 0.0 && tau_max.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "tau_max must be positive, got {tau_max}"
        )));
    }
    let x = params.x;
    let a2 = params.alpha * params.alpha;
    let diff = 2.0 * params.theta * a2;
    let h = tau_max / (n - 1) as f64;
    let node = |k: usize| if k + 1 == n { tau_max } else { k as f64 * h };

    let mut d_gamma = Vec::with_capacity(n);
    let mut d_delta = Vec::with_capacity(n);
    let mut d_pi = Vec::with_capacity(n);
    for k in 0..n {
        let u = node(k);
        let (sn, cs) = (u / x).sin_cos();
        let ks = sine_kernel(u, params.s, quad)?;
        let kc = cosine_kernel(u, params.s, quad)?;
        d_gamma.push(a2 * ks * sn);
        d_delta.push(diff * kc * cs);
        d_pi.push(diff * kc * sn);
    }
    let integrate = |d: &[f64]| -> Result<UniformGrid> {
        cumulative_integral(&UniformGrid::new(tau_max, d.to_vec())?)
    };
    let gamma = integrate(&d_gamma)?;
    let delta = integrate(&d_delta)?;
    let pi = integrate(&d_pi)?;
    let two_gamma: Vec<f64> = gamma.values().iter().map(|g| 2.0 * g).collect();
    let big_gamma = integrate(&two_gamma)?;

    // V(tau) = e^{-Gamma} int_0^tau e^{Gamma(u)} R^T M R du, W = R V R^T.
    let mut inner = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for k in 0..n {
        let r = rotation(node(k), x)?;
        let m = drift_matrix(delta.values()[k], pi.values()[k]);
        let integrand = r.transpose() * m * r * big_gamma.values()[k].exp();
        inner[0].push(integrand[(0, 0)]);
        inner[1].push(0.5 * (integrand[(0, 1)] + integrand[(1, 0)]));
        inner[2].push(integrand[(1, 1)]);
    }
    let k11 = integrate(&inner[0])?;
    let k12 = integrate(&inner[1])?;
    let k22 = integrate(&inner[2])?;

    let om = omega();
    let mut wbar = Vec::with_capacity(n);
    let mut d_wbar = Vec::with_capacity(n);
    for k in 0..n {
        let r = rotation(node(k), x)?;
        let v = Matrix2::new(
            k11.values()[k],
            k12.values()[k],
            k12.values()[k],
            k22.values()[k],
        ) * (-big_gamma.values()[k]).exp();
        let w = symmetrize(&(r * v * r.transpose()));
        // dW/dtau = (Omega W + W Omega^T) / x - 2 gamma W + M
        let m = drift_matrix(delta.values()[k], pi.values()[k]);
        let dw = (om * w + w * om.transpose()) / x - w * (2.0 * gamma.values()[k]) + m;
        wbar.push(w);
        d_wbar.push(symmetrize(&dw));
    }
    wbar[0] = Matrix2::zeros();

    let grid = CoefficientGrid {
        params,
        gamma,
        delta,
        pi,
        big_gamma,
        wbar,
        d_gamma,
        d_delta,
        d_pi,
        d_wbar,
    };
    grid.check_finite()?;
    Ok(grid)
}

fn drift_matrix(delta: f64, pi: f64) -> Matrix2<f64> {
    Matrix2::new(delta, -0.5 * pi, -0.5 * pi, 0.0)
}

fn symmetrize(m: &Matrix2<f64>) -> Matrix2<f64> {
    let off = 0.5 * (m[(0, 1)] + m[(1, 0)]);
    Matrix2::new(m[(0, 0)], off, off, m[(1, 1)])
}

impl CoefficientGrid {
    fn check_finite(&self) -> Result<()> {
        let scalars = self
            .gamma
            .values()
            .iter()
            .chain(self.delta.values())
            .chain(self.pi.values())
            .chain(self.big_gamma.values())
            .chain(&self.d_gamma)
            .chain(&self.d_delta)
            .chain(&self.d_pi);
        let matrices = self.wbar.iter().chain(&self.d_wbar).flat_map(|m| m.iter());
        if scalars.chain(matrices).all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Numeric(
                "non-finite channel coefficient in grid".to_string(),
            ))
        }
    }

    pub fn params(&self) -> &QbmParams {
        &self.params
    }

    pub fn tau_max(&self) -> f64 {
        self.gamma.t_max()
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.gamma.step()
    }

    pub fn tau(&self, k: usize) -> f64 {
        self.gamma.node(k)
    }

    pub fn gamma(&self) -> &[f64] {
        self.gamma.values()
    }

    pub fn delta(&self) -> &[f64] {
        self.delta.values()
    }

    pub fn pi(&self) -> &[f64] {
        self.pi.values()
    }

    pub fn big_gamma(&self) -> &[f64] {
        self.big_gamma.values()
    }

    pub fn wbar(&self) -> &[Matrix2<f64>] {
        &self.wbar
    }

    /// Coefficients at node `k`, without interpolation.
    pub fn at_node(&self, k: usize) -> Coefficients {
        Coefficients {
            gamma: self.gamma.values()[k],
            delta: self.delta.values()[k],
            pi: self.pi.values()[k],
            big_gamma: self.big_gamma.values()[k],
            wbar: self.wbar[k],
        }
    }

    /// Coefficients at an arbitrary `tau` in `[0, tau_max]`.
    pub fn coefficients(&self, tau: f64) -> Result<Coefficients> {
        let (k, s) = self.gamma.locate(tau)?;
        if s == 0.0 {
            return Ok(self.at_node(k));
        }
        let h = self.step();
        let interp = |y: &[f64], d: &[f64]| hermite_basis(s, h, y[k], y[k + 1], d[k], d[k + 1]);
        let two_gamma = [2.0 * self.gamma()[k], 2.0 * self.gamma()[k + 1]];
        let big_gamma = hermite_basis(
            s,
            h,
            self.big_gamma()[k],
            self.big_gamma()[k + 1],
            two_gamma[0],
            two_gamma[1],
        );
        let w = |i: usize, j: usize| {
            hermite_basis(
                s,
                h,
                self.wbar[k][(i, j)],
                self.wbar[k + 1][(i, j)],
                self.d_wbar[k][(i, j)],
                self.d_wbar[k + 1][(i, j)],
            )
        };
        let w12 = w(0, 1);
        Ok(Coefficients {
            gamma: interp(self.gamma(), &self.d_gamma),
            delta: interp(self.delta(), &self.d_delta),
            pi: interp(self.pi(), &self.d_pi),
            big_gamma,
            wbar: Matrix2::new(w(0, 0), w12, w12, w(1, 1)),
        })
    }
}

/// One-mode Gaussian channel `sigma -> X sigma X^T + Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPair {
    pub x_mat: Matrix2<f64>,
    pub y_mat: Matrix2<f64>,
    pub tau: f64,
}

impl ChannelPair {
    pub fn identity() -> Self {
        Self {
            x_mat: Matrix2::identity(),
            y_mat: Matrix2::zeros(),
            tau: 0.0,
        }
    }

    /// Acts on a one-mode covariance matrix.
    pub fn apply(&self, sigma: &Matrix2<f64>) -> Matrix2<f64> {
        self.x_mat * sigma * self.x_mat.transpose() + self.y_mat
    }

    /// The channel that applies `self` first and `later` second.
    pub fn then(&self, later: &ChannelPair) -> ChannelPair {
        ChannelPair {
            x_mat: later.x_mat * self.x_mat,
            y_mat: later.x_mat * self.y_mat * later.x_mat.transpose() + later.y_mat,
            tau: self.tau + later.tau,
        }
    }
}

/// `X = e^{-Gamma/2} [R^{-1}]^T`, `Y = 2 W` at transit time `tau`.
pub fn channel_pair(grid: &CoefficientGrid, tau: f64) -> Result<ChannelPair> {
    let c = grid.coefficients(tau)?;
    let r = rotation(tau, grid.params().x)?;
    let r_inv = r.transpose();
    Ok(ChannelPair {
        x_mat: r_inv.transpose() * (-0.5 * c.big_gamma).exp(),
        y_mat: c.wbar * 2.0,
        tau,
    })
}

/// Sends mode 2 of a two-mode state through the channel; mode 1 is untouched.
pub fn apply_channel_mode2(sigma: &TwoModeCov, pair: &ChannelPair) -> Result<TwoModeCov> {
    if !sigma.is_physical() {
        return Err(Error::Validation(
            "input two-mode covariance violates the uncertainty principle".to_string(),
        ));
    }
    let blocks = sigma.blocks();
    let x = pair.x_mat;
    let c = blocks.c_block * x.transpose();
    let d = x * blocks.d_block * x.transpose() + pair.y_mat;
    TwoModeCov::from_blocks(&crate::gaussian::TwoModeBlocks {
        a_block: blocks.a_block,
        d_block: d,
        c_block: c,
    })
}
