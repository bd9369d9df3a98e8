//! Run configuration: one JSON file per run, validated before any
//! computation with field-path error messages.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::forcing::ForcingSpec;
use crate::grid::GridSpec;
use crate::solver::SolveConfig;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub time_modes: usize,
    pub space_modes: usize,
    #[serde(default)]
    pub time_points: Option<usize>,
    #[serde(default)]
    pub space_points: Option<usize>,
    #[serde(default)]
    pub dealias: Option<f64>,
}

impl GridConfig {
    pub fn to_grid(&self) -> GridSpec {
        let mut g = GridSpec::new(self.time_modes, self.space_modes);
        if let Some(nt) = self.time_points {
            g.time_points = nt;
        }
        if let Some(nx) = self.space_points {
            g.space_points = nx;
        }
        if let Some(d) = self.dealias {
            g.dealias = d;
        }
        g
    }
}

/// Options for the `verify` command.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyOptions {
    pub samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 200 }
    }
}

/// Options for the time-stepping oracle and the compare command.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleOptions {
    pub steps_per_period: usize,
    pub max_periods: usize,
    pub drift_tol: f64,
    /// Acceptance threshold on the endpoint-vs-attractor discrepancy.
    pub threshold: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            steps_per_period: 384,
            max_periods: 600,
            drift_tol: 1e-9,
            threshold: 1e-6,
        }
    }
}

/// Options for the ground-state certificate command.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColeHopfOptions {
    /// Read the drift from a stored `t,x,u` CSV instead of solving first.
    pub drift_csv: Option<PathBuf>,
    pub steps_per_period: usize,
    pub max_iterations: usize,
    pub tol: f64,
    /// Also dump the eigenfunction as phi.csv.
    pub dump_phi: bool,
}

impl Default for ColeHopfOptions {
    fn default() -> Self {
        ColeHopfOptions {
            drift_csv: None,
            steps_per_period: 512,
            max_iterations: 200,
            tol: 1e-10,
            dump_phi: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mu: f64,
    pub grid: GridConfig,
    pub forcing: ForcingSpec,
    #[serde(default)]
    pub solve: SolveConfig,
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub verify: VerifyOptions,
    #[serde(default)]
    pub oracle: OracleOptions,
    #[serde(default)]
    pub cole_hopf: ColeHopfOptions,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config(
                path.display().to_string(),
                format!("cannot read config: {e}"),
            )
        })?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::config("mu", "viscosity must be > 0"));
        }
        let grid = self.grid.to_grid();
        grid.validate()
            .map_err(|e| Error::config("grid", e.to_string()))?;
        self.forcing.validate()?;
        self.solve
            .validate()
            .map_err(|e| Error::config("solve", e.to_string()))?;
        if self.verify.samples == 0 {
            return Err(Error::config("verify.samples", "must be >= 1"));
        }
        if self.oracle.steps_per_period < 2 {
            return Err(Error::config("oracle.steps_per_period", "must be >= 2"));
        }
        if !(self.oracle.threshold > 0.0) {
            return Err(Error::config("oracle.threshold", "must be > 0"));
        }
        if !(self.cole_hopf.tol > 0.0) {
            return Err(Error::config("cole_hopf.tol", "must be > 0"));
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> GridSpec {
        self.grid.to_grid()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> &'static str {
        r#"{
            "mu": 1.0,
            "grid": {"time_modes": 8, "space_modes": 16},
            "forcing": {"terms": [{"kind": "modal", "amplitude": 1.0, "k": 0, "m": 1}]},
            "seed": 42
        }"#
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg: RunConfig = serde_json::from_str(minimal_json()).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.grid_spec().time_points, 17);
        assert_eq!(cfg.solve.lambda_grid.len(), 21);
        assert_eq!(cfg.verify.samples, 200);
    }

    #[test]
    fn invalid_mu_names_the_field() {
        let text = minimal_json().replace("\"mu\": 1.0", "\"mu\": -2.0");
        let cfg: RunConfig = serde_json::from_str(&text).unwrap();
        match cfg.validate() {
            Err(Error::Config { path, .. }) => assert_eq!(path, "mu"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = minimal_json().replace("\"seed\": 42", "\"seed\": 42, \"typo\": 1");
        assert!(serde_json::from_str::<RunConfig>(&text).is_err());
    }
}
