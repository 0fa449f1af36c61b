//! Run configuration: a TOML file with `[physics]`, `[grid]`, `[scattering]` and `[run]`
//! sections. Every key has a default, so an empty file is a valid configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{find_horizons, Cutoff, SpacetimeParams};
use crate::states::RandomDataSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsConfig {
    pub lambda: f64,
    pub mass: f64,
    pub spin: f64,
    pub n: i32,
    pub m2: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self { lambda: 0.05, mass: 1.0, spin: 0.05, n: 1, m2: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n_x: usize,
    pub n_theta: usize,
    pub q_max: usize,
    /// Half-width of the `x` grid. Omitted means the automatic rule.
    pub x_max: Option<f64>,
    pub cutoff_center: f64,
    pub cutoff_width: f64,
    pub cfl: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n_x: 2048, n_theta: 24, q_max: 12, x_max: None, cutoff_center: 0.0, cutoff_width: 10.0, cfl: 0.4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScatteringConfig {
    pub tol: f64,
    /// Omitted means `4R + 20/κ+` for the data radius `R`.
    pub t_max: Option<f64>,
    pub checkpoint: f64,
}

impl Default for ScatteringConfig {
    fn default() -> Self {
        Self { tol: 1e-4, t_max: None, checkpoint: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Number of random states in suites.
    pub suite_size: usize,
    /// Duration of the `evolve` scenario.
    pub evolve_time: f64,
    /// Norm samples per unit time in `evolve` histories.
    pub samples_per_unit: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { seed: 20240607, suite_size: 4, evolve_time: 20.0, samples_per_unit: 4 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub physics: PhysicsConfig,
    pub grid: GridConfig,
    pub scattering: ScatteringConfig,
    pub run: RunConfig,
}

/// Coefficients reach their horizon limits to this relative accuracy at the automatic `x_max`.
pub const AUTO_X_DECAY: f64 = 1e-10;

/// Room beyond `t_max + R` so that nothing reaches the grid ends.
pub const AUTO_X_MARGIN: f64 = 10.0;

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn params(&self) -> Result<SpacetimeParams> {
        let p = &self.physics;
        SpacetimeParams::new(p.lambda, p.mass, p.spin, p.n, p.m2)
    }

    /// Fill in `x_max` and `t_max` and check every invariant.
    pub fn resolve(&self) -> Result<Config> {
        let params = self.params()?;
        let g = &self.grid;
        if g.n_x < 16 {
            return Err(Error::Config(format!("grid.n_x = {} must be at least 16", g.n_x)));
        }
        if !(g.cfl > 0.0 && g.cfl <= 1.0) {
            return Err(Error::Config(format!("grid.cfl = {} must lie in (0, 1]", g.cfl)));
        }
        if !(g.cutoff_width > 0.0) {
            return Err(Error::Config("grid.cutoff_width must be positive".into()));
        }
        if g.q_max == 0 {
            return Err(Error::Config("grid.q_max must be positive".into()));
        }
        let s = &self.scattering;
        if !(s.tol > 0.0) || !(s.checkpoint > 0.0) {
            return Err(Error::Config("scattering.tol and scattering.checkpoint must be positive".into()));
        }
        let h = find_horizons(&params)?;
        let radius = RandomDataSpec::default().radius();
        let t_max = match s.t_max {
            Some(t) if t > 0.0 => t,
            Some(t) => return Err(Error::Config(format!("scattering.t_max = {t} must be positive"))),
            None => 4.0 * radius + 20.0 / h.kappa_plus,
        };
        let x_max = match g.x_max {
            Some(x) if x > 0.0 => x,
            Some(x) => return Err(Error::Config(format!("grid.x_max = {x} must be positive"))),
            None => {
                let decay = -AUTO_X_DECAY.ln() / h.kappa_plus.min(h.kappa_minus);
                decay.max(t_max + radius + AUTO_X_MARGIN)
            }
        };
        let mut out = self.clone();
        out.grid.x_max = Some(x_max);
        out.scattering.t_max = Some(t_max);
        Ok(out)
    }

    pub fn cutoff(&self) -> Cutoff {
        Cutoff::new(self.grid.cutoff_center, self.grid.cutoff_width)
    }

    /// `x_max` after [`Config::resolve`].
    pub fn x_max(&self) -> f64 {
        self.grid.x_max.unwrap_or(40.0)
    }

    /// `t_max` after [`Config::resolve`].
    pub fn t_max(&self) -> f64 {
        self.scattering.t_max.unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = Config::from_toml_str("").unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.grid.n_x, 2048);
        assert_eq!(c.physics.spin, 0.05);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(Config::from_toml_str("[grid]\nnx = 3\n"), Err(Error::Config(_))));
    }

    #[test]
    fn resolve_fills_auto_values() {
        let c = Config::default().resolve().unwrap();
        let t = c.t_max();
        assert!(t > 100.0);
        assert!(c.x_max() >= t);
    }

    #[test]
    fn resolved_config_round_trips_through_toml() {
        let c = Config::default().resolve().unwrap();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(Config::from_toml_str(&text).unwrap(), c);
    }

    #[test]
    fn invalid_physics_is_a_config_error() {
        let c = Config::from_toml_str("[physics]\nlambda = -1.0\n").unwrap();
        assert!(c.resolve().is_err());
    }
}
