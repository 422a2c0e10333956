//! Tabulated outputs of the sweep driver.
//!
//! Rows are evaluated in parallel and assembled in `tau` order, and numbers
//! are printed with a fixed 12-significant-digit format, so identical
//! configurations give byte-identical CSV.

use std::io::Write;

use rayon::prelude::*;

use crate::channel::{build_coefficient_grid_with, CoefficientGrid};
use crate::config::SweepConfig;
use crate::error::{Error, Result};
use crate::nonmarkov::np_from_grid;
use crate::teleportation::{
    angular_distance, fidelity_closed_form, optimal_phase, optimize_phase_numeric,
    resource_entanglement,
};
use crate::CLASSICAL_THRESHOLD;

/// Columns of the `sweep` table, in emission order.
pub const SWEEP_COLUMNS: &[&str] = &[
    "tau",
    "phi_opt",
    "f_opt",
    "f_fixed_phase_pi",
    "e_n",
    "n_p",
    "classical_threshold",
];

/// Optional `sweep` column: fidelity at the configured phase `phi`.
pub const FIXED_PHI_COLUMN: &str = "f_phi";

pub const COEFF_COLUMNS: &[&str] = &[
    "tau",
    "gamma",
    "delta",
    "pi",
    "big_gamma",
    "wbar11",
    "wbar12",
    "wbar22",
];

pub const PHASE_OPT_COLUMNS: &[&str] = &[
    "tau",
    "phi_opt_analytic",
    "phi_opt_numeric",
    "phase_error",
    "f_opt_analytic",
    "f_opt_numeric",
];

/// A rectangular table of reals with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Keeps only `names`, in the given order. An empty list keeps everything.
    pub fn select(&self, names: &[String]) -> Result<Table> {
        if names.is_empty() {
            return Ok(self.clone());
        }
        let idx = names
            .iter()
            .map(|n| {
                self.columns.iter().position(|c| c == n).ok_or_else(|| {
                    Error::config(
                        "outputs",
                        format!(
                            "unknown column `{n}` (available: {})",
                            self.columns.join(",")
                        ),
                    )
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Table {
            columns: names.to_vec(),
            rows: self
                .rows
                .iter()
                .map(|r| idx.iter().map(|&i| r[i]).collect())
                .collect(),
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_value(*v)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
    }
}

/// Scientific notation with 12 significant digits.
pub fn format_value(v: f64) -> String {
    // avoid emitting "-0.00000000000e0"
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

/// Builds the coefficient grid described by `cfg`.
pub fn build_grid(cfg: &SweepConfig) -> Result<CoefficientGrid> {
    build_grid_for(cfg, cfg.qbm)
}

pub(crate) fn build_grid_for(
    cfg: &SweepConfig,
    qbm: crate::channel::QbmParams,
) -> Result<CoefficientGrid> {
    build_coefficient_grid_with(qbm, cfg.tau_max, cfg.grid_n, &cfg.quadrature())
}

fn evaluate_rows<F>(cfg: &SweepConfig, row: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(f64) -> Result<Vec<f64>> + Sync + Send,
{
    cfg.sweep_taus().into_par_iter().map(row).collect()
}

/// Phase-optimised fidelity, fixed-phase fidelity, resource
/// entanglement and non-Markovianity versus transit time.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Table> {
    cfg.validate()?;
    let grid = build_grid(cfg)?;
    run_sweep_on(cfg, &grid)
}

pub fn run_sweep_on(cfg: &SweepConfig, grid: &CoefficientGrid) -> Result<Table> {
    let pp = cfg.protocol()?;
    let x = cfg.qbm.x;
    let rows = evaluate_rows(cfg, |tau| {
        let phi_opt = optimal_phase(tau, x)?;
        let f_opt = fidelity_closed_form(&pp.with_phi(phi_opt), grid, tau)?;
        let f_pi = fidelity_closed_form(&pp.with_phi(std::f64::consts::PI), grid, tau)?;
        let f_phi = fidelity_closed_form(&pp, grid, tau)?;
        let e_n = resource_entanglement(pp.r, pp.phi, grid, tau)?;
        let n_p = np_from_grid(grid, tau)?;
        Ok(vec![
            tau,
            phi_opt,
            f_opt,
            f_pi,
            e_n,
            n_p,
            CLASSICAL_THRESHOLD,
            f_phi,
        ])
    })?;
    let mut columns = SWEEP_COLUMNS.to_vec();
    columns.push(FIXED_PHI_COLUMN);
    let full = Table::new(&columns, rows);
    if cfg.outputs.is_empty() {
        let default: Vec<String> = SWEEP_COLUMNS.iter().map(|c| c.to_string()).collect();
        full.select(&default)
    } else {
        full.select(&cfg.outputs)
    }
}

/// Channel coefficients and `W` entries versus `tau`.
pub fn coefficient_table(cfg: &SweepConfig) -> Result<Table> {
    cfg.validate()?;
    let grid = build_grid(cfg)?;
    let rows = evaluate_rows(cfg, |tau| {
        let c = grid.coefficients(tau)?;
        Ok(vec![
            tau,
            c.gamma,
            c.delta,
            c.pi,
            c.big_gamma,
            c.wbar[(0, 0)],
            c.wbar[(0, 1)],
            c.wbar[(1, 1)],
        ])
    })?;
    Table::new(COEFF_COLUMNS, rows).select(&cfg.outputs)
}

/// Analytic versus numerically optimised squeezing phase.
pub fn phase_opt_table(cfg: &SweepConfig) -> Result<Table> {
    cfg.validate()?;
    let grid = build_grid(cfg)?;
    let pp = cfg.protocol()?;
    let x = cfg.qbm.x;
    let rows = evaluate_rows(cfg, |tau| {
        let analytic = optimal_phase(tau, x)?;
        let f_analytic = fidelity_closed_form(&pp.with_phi(analytic), &grid, tau)?;
        let numeric = optimize_phase_numeric(&pp, &grid, tau)?;
        Ok(vec![
            tau,
            analytic,
            numeric.phi,
            angular_distance(analytic, numeric.phi),
            f_analytic,
            numeric.fidelity,
        ])
    })?;
    Table::new(PHASE_OPT_COLUMNS, rows).select(&cfg.outputs)
}
