//! Shared fixtures for the criterion benchmarks.

use qbm_teleport_core::{build_coefficient_grid, CoefficientGrid, QbmParams, SweepConfig};

/// Default settings over `[0, 3]` with the given grid resolution.
pub fn default_config(grid_n: usize, n_points: usize) -> SweepConfig {
    SweepConfig {
        grid_n,
        n_points,
        ..SweepConfig::default()
    }
}

/// Default-parameter coefficient grid.
pub fn default_grid(n: usize) -> CoefficientGrid {
    build_coefficient_grid(QbmParams::default(), 3.0, n).expect("default grid builds")
}
