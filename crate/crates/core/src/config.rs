//! Flat `key=value` configuration for the sweep driver.
//!
//! One pair per line, `#` starts a comment, blank lines are ignored. Values
//! given as overrides (command-line flags) replace values from the file.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use crate::channel::{KernelQuadrature, QbmParams};
use crate::error::{Error, Result};
use crate::teleportation::ProtocolParams;

/// Every key accepted in a config file or as an override.
pub const KEYS: &[&str] = &[
    "x",
    "s",
    "theta",
    "alpha",
    "r",
    "phi",
    "transmissivity_sq",
    "gain",
    "tau_max",
    "n_points",
    "grid_n",
    "eps",
    "omega_max",
    "quad_tol",
    "outputs",
    "out",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub qbm: QbmParams,
    pub r: f64,
    /// Fixed squeezing phase used where the phase is not optimised.
    pub phi: f64,
    /// `T^2` of the Bell-measurement beam splitters.
    pub transmissivity_sq: f64,
    /// Classical-channel gain; `None` means `1 / T`.
    pub gain: Option<f64>,
    pub tau_max: f64,
    /// Number of sweep rows over `[0, tau_max]`.
    pub n_points: usize,
    /// Number of nodes of the coefficient grid over `[0, tau_max]`.
    pub grid_n: usize,
    /// Intermediate-map increment for the spectral non-Markovianity measure.
    pub eps: f64,
    pub omega_max: f64,
    pub quad_tol: f64,
    /// Column subset to emit; empty means all.
    pub outputs: Vec<String>,
    pub out_path: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let quad = KernelQuadrature::default();
        Self {
            qbm: QbmParams::default(),
            r: 2.0,
            phi: PI,
            transmissivity_sq: 0.9,
            gain: None,
            tau_max: 3.0,
            n_points: 201,
            grid_n: 2001,
            eps: crate::nonmarkov::DEFAULT_EPS,
            omega_max: quad.omega_max,
            quad_tol: quad.tol,
            outputs: Vec::new(),
            out_path: None,
        }
    }
}

impl SweepConfig {
    pub fn transmissivity(&self) -> f64 {
        self.transmissivity_sq.sqrt()
    }

    pub fn protocol(&self) -> Result<ProtocolParams> {
        let t = self.transmissivity();
        ProtocolParams::with_gain(self.r, self.phi, t, self.gain.unwrap_or(1.0 / t))
    }

    pub fn quadrature(&self) -> KernelQuadrature {
        KernelQuadrature {
            omega_max: self.omega_max,
            tol: self.quad_tol,
        }
    }

    /// Sweep abscissae `tau_j = j tau_max / (n_points - 1)`.
    pub fn sweep_taus(&self) -> Vec<f64> {
        let step = self.tau_max / (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|j| {
                if j + 1 == self.n_points {
                    self.tau_max
                } else {
                    j as f64 * step
                }
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive, got {v}")))
            }
        };
        positive("x", self.qbm.x)?;
        positive("s", self.qbm.s)?;
        positive("theta", self.qbm.theta)?;
        positive("alpha", self.qbm.alpha)?;
        if self.qbm.alpha > 0.5 {
            return Err(Error::config(
                "alpha",
                "must not exceed 0.5 (weak coupling)",
            ));
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(Error::config(
                "r",
                format!("must be non-negative, got {}", self.r),
            ));
        }
        if !self.phi.is_finite() {
            return Err(Error::config("phi", "must be finite"));
        }
        if !(self.transmissivity_sq > 0.0 && self.transmissivity_sq <= 1.0) {
            return Err(Error::config(
                "transmissivity_sq",
                format!("must lie in (0, 1], got {}", self.transmissivity_sq),
            ));
        }
        if let Some(g) = self.gain {
            positive("gain", g)?;
        }
        positive("tau_max", self.tau_max)?;
        if self.n_points < 2 {
            return Err(Error::config(
                "n_points",
                format!("must be at least 2, got {}", self.n_points),
            ));
        }
        if self.grid_n < 9 {
            return Err(Error::config(
                "grid_n",
                format!("must be at least 9, got {}", self.grid_n),
            ));
        }
        positive("eps", self.eps)?;
        if self.eps >= self.tau_max {
            return Err(Error::config("eps", "must be smaller than tau_max"));
        }
        positive("omega_max", self.omega_max)?;
        positive("quad_tol", self.quad_tol)?;
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = || -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| Error::config(key, format!("`{value}` is not a number")))
        };
        let count = || -> Result<usize> {
            value
                .parse::<usize>()
                .map_err(|_| Error::config(key, format!("`{value}` is not a non-negative integer")))
        };
        match key {
            "x" => self.qbm.x = num()?,
            "s" => self.qbm.s = num()?,
            "theta" => self.qbm.theta = num()?,
            "alpha" => self.qbm.alpha = num()?,
            "r" => self.r = num()?,
            "phi" => self.phi = num()?,
            "transmissivity_sq" => self.transmissivity_sq = num()?,
            "gain" => self.gain = Some(num()?),
            "tau_max" => self.tau_max = num()?,
            "n_points" => self.n_points = count()?,
            "grid_n" => self.grid_n = count()?,
            "eps" => self.eps = num()?,
            "omega_max" => self.omega_max = num()?,
            "quad_tol" => self.quad_tol = num()?,
            "outputs" => {
                self.outputs = value
                    .split(',')
                    .map(str::trim)
                    .filter(|c| !c.is_empty())
                    .map(String::from)
                    .collect()
            }
            "out" => self.out_path = Some(PathBuf::from(value)),
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }
}

/// Resolves a configuration from file contents plus `(key, value)`
/// overrides, applying defaults for anything left unset.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<SweepConfig> {
    let mut entries: BTreeMap<String, String> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: idx + 1,
            reason: format!("expected `key=value`, got `{line}`"),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Parse {
                line: idx + 1,
                reason: "empty key".to_string(),
            });
        }
        if !KEYS.contains(&key) {
            return Err(Error::config(
                key,
                format!("unknown key (line {})", idx + 1),
            ));
        }
        entries.insert(key.to_string(), value.trim().to_string());
    }
    for (key, value) in overrides {
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::config(key, "unknown key"));
        }
        entries.insert(key.clone(), value.clone());
    }

    let mut cfg = SweepConfig::default();
    // Apply in the fixed KEYS order so results never depend on input order.
    for key in KEYS {
        if let Some(value) = entries.get(*key) {
            cfg.set(key, value)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
