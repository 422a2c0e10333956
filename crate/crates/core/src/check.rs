//! Self-consistency suite behind the `check` subcommand.
//!
//! Each check compares two independent routes to the same quantity and
//! reports the worst discrepancy it saw.

use std::f64::consts::PI;

use crate::channel::{apply_channel_mode2, channel_pair, CoefficientGrid, QbmParams};
use crate::config::SweepConfig;
use crate::error::Result;
use crate::gaussian::{log_negativity, pt_symplectic_eig_min, tmsv_covariance};
use crate::nonmarkov::{intermediate_map, np_from_grid, np_spectral, np_spectral_extrapolated};
use crate::oracle::{ohmic_coefficients, pt_symplectic_spectrum};
use crate::sweep::build_grid_for;
use crate::teleportation::{
    angular_distance, fidelity_closed_form, fidelity_det, optimal_phase, optimize_phase_numeric,
    ProtocolParams,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn bound(name: &'static str, worst: f64, tol: f64) -> Self {
        Self {
            name,
            passed: worst.is_finite() && worst <= tol,
            detail: format!("max deviation {worst:.3e} (tol {tol:.0e})"),
        }
    }
}

impl std::fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

struct Grids<'a> {
    cfg: &'a SweepConfig,
    span: f64,
}

impl Grids<'_> {
    fn with_x(&self, x: f64) -> Result<CoefficientGrid> {
        let qbm = QbmParams::new(x, self.cfg.qbm.s, self.cfg.qbm.theta, self.cfg.qbm.alpha)?;
        let mut cfg = self.cfg.clone();
        cfg.tau_max = self.span;
        build_grid_for(&cfg, qbm)
    }
}

/// Runs every check with the bath settings, grid resolution and quadrature
/// controls taken from `cfg`. Time spans are fixed by the checks themselves.
pub fn run_checks(cfg: &SweepConfig) -> Result<Vec<CheckOutcome>> {
    cfg.validate()?;
    let grids = Grids { cfg, span: 2.5 };
    let base = grids.with_x(cfg.qbm.x)?;
    let mut out = Vec::new();

    let worst = [0.0, 0.5, 1.0, 2.0]
        .iter()
        .map(|&r| -> Result<f64> {
            let pp = ProtocolParams::with_gain(r, PI, 1.0, 1.0)?;
            Ok((fidelity_det(&pp, &base, 0.0)? - 1.0 / (1.0 + (-2.0 * r).exp())).abs())
        })
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))?;
    out.push(CheckOutcome::bound("ideal-limit fidelity", worst, 1e-10));

    let pp = ProtocolParams::new(2.0, PI, 0.9f64.sqrt())?;
    let expected = 1.0 / (1.0 + (-4.0f64).exp() + 1.0 / 9.0);
    let worst = (fidelity_closed_form(&pp, &base, 0.0)? - expected)
        .abs()
        .max((fidelity_det(&pp, &base, 0.0)? - expected).abs());
    out.push(CheckOutcome::bound("noisy-Bell baseline", worst, 1e-9));

    let mut worst = 0.0f64;
    for x in [0.1, 1.0, 10.0] {
        let grid = grids.with_x(x)?;
        for t_sq in [0.9f64, 1.0] {
            for r in [0.5, 1.0, 2.0] {
                for phi in [0.0, PI / 2.0, PI] {
                    for dtau in [0.0, 0.3, 0.7, 1.5] {
                        let pp = ProtocolParams::new(r, phi, t_sq.sqrt())?;
                        let a = fidelity_closed_form(&pp, &grid, dtau)?;
                        let b = fidelity_det(&pp, &grid, dtau)?;
                        worst = worst.max(((a - b) / b).abs());
                    }
                }
            }
        }
    }
    out.push(CheckOutcome::bound(
        "closed-form vs determinant fidelity",
        worst,
        1e-8,
    ));

    let mut worst = 0.0f64;
    let pp = cfg.protocol()?;
    for x in [0.05, 0.1, 1.0] {
        let grid = grids.with_x(x)?;
        for dtau in [0.1, 0.5, 1.0, 2.0] {
            let numeric = optimize_phase_numeric(&pp, &grid, dtau)?;
            worst = worst.max(angular_distance(numeric.phi, optimal_phase(dtau, x)?));
        }
    }
    out.push(CheckOutcome::bound("optimal phase", worst, 1e-4));

    let mut worst = 0.0f64;
    for j in 0..=12 {
        let r = 0.25 * j as f64;
        worst = worst.max(
            (log_negativity(pt_symplectic_eig_min(&tmsv_covariance(r, 0.0)?)?)? - 2.0 * r).abs(),
        );
    }
    for j in 0..20 {
        let r = 0.2 + 0.14 * j as f64;
        let phi = 0.31 * j as f64;
        let dtau = 0.1 * j as f64;
        let evolved = apply_channel_mode2(&tmsv_covariance(r, phi)?, &channel_pair(&base, dtau)?)?;
        let nu = pt_symplectic_eig_min(&evolved)?;
        worst = worst.max((nu - pt_symplectic_spectrum(evolved.matrix())?[0]).abs());
    }
    out.push(CheckOutcome::bound("entanglement oracle", worst, 1e-8));

    let mut worst = np_spectral(&base, 0.0, cfg.eps)?;
    for x in [0.1, 1.0] {
        let grid = grids.with_x(x)?;
        for t in [0.25, 0.5, 1.0, 2.0] {
            let spectral = np_spectral_extrapolated(&grid, t, cfg.eps)?;
            worst = worst.max((spectral - np_from_grid(&grid, t)?).abs());
        }
    }
    out.push(CheckOutcome::bound("non-Markovianity limit", worst, 1e-3));

    let mut worst = 0.0f64;
    for j in 0..10 {
        let t1 = 0.05 + 0.19 * j as f64;
        let t2 = t1 + 0.03 + 0.021 * j as f64;
        let first = channel_pair(&base, t1)?;
        let second = intermediate_map(&base, t1, t2 - t1)?.pair;
        let composed = first.then(&second);
        let direct = channel_pair(&base, t2)?;
        worst = worst
            .max((composed.x_mat - direct.x_mat).amax())
            .max((composed.y_mat - direct.y_mat).amax());
    }
    out.push(CheckOutcome::bound("channel composition", worst, 1e-8));

    let mut worst = 0.0f64;
    let mut ohmic = cfg.clone();
    ohmic.qbm.s = 1.0;
    let ohmic_grids = Grids {
        cfg: &ohmic,
        span: grids.span,
    };
    for x in [0.1, 1.0] {
        let grid = ohmic_grids.with_x(x)?;
        for tau in [0.1, 0.5, 1.0, 2.0] {
            let c = grid.coefficients(tau)?;
            let (g, d, p) = ohmic_coefficients(tau, grid.params(), 1e-12)?;
            for (a, b) in [(c.gamma, g), (c.delta, d), (c.pi, p)] {
                worst = worst.max(((a - b) / b).abs());
            }
        }
    }
    out.push(CheckOutcome::bound("Ohmic coefficient oracle", worst, 1e-6));

    Ok(out)
}
