//! Run configuration: tolerances, sampling grid, search budget and dilation
//! depth. Every document echoes the configuration that produced it, and an
//! echoed block can be fed back with `--config`.

use contractions_core::charfn::GridSpec;
use contractions_core::dilation::DEFAULT_DEPTH;
use contractions_core::order::DEFAULT_WORD_LENGTH;
use contractions_core::verdict::Budget;
use contractions_core::{Complex64, Tolerance};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub rank_tol: f64,
    pub residual_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub radii: Vec<f64>,
    pub angles: usize,
    /// Additional interior points as `[re, im]`.
    #[serde(default)]
    pub extra_points: Vec<[f64; 2]>,
    pub boundary_angles: usize,
    pub boundary_eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    pub seed: u64,
    pub starts: usize,
    pub max_iters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub tolerance: ToleranceConfig,
    pub grid: GridConfig,
    pub budget: BudgetConfig,
    pub depth: usize,
    pub word_length: usize,
}

impl Default for Config {
    fn default() -> Self {
        let tol = Tolerance::default();
        let grid = GridSpec::default();
        let budget = Budget::default();
        Config {
            tolerance: ToleranceConfig {
                rank_tol: tol.rank_tol,
                residual_tol: tol.residual_tol,
            },
            grid: GridConfig {
                radii: grid.radii,
                angles: grid.angles,
                extra_points: grid.extra_points.iter().map(|z| [z.re, z.im]).collect(),
                boundary_angles: grid.boundary_angles,
                boundary_eps: grid.boundary_eps,
            },
            budget: BudgetConfig {
                seed: budget.seed,
                starts: budget.starts,
                max_iters: budget.max_iters,
            },
            depth: DEFAULT_DEPTH,
            word_length: DEFAULT_WORD_LENGTH,
        }
    }
}

impl Config {
    pub fn tolerance(&self) -> Result<Tolerance> {
        Ok(Tolerance::new(self.tolerance.rank_tol, self.tolerance.residual_tol)?)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let grid = GridSpec {
            radii: self.grid.radii.clone(),
            angles: self.grid.angles,
            extra_points: self
                .grid
                .extra_points
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
            boundary_angles: self.grid.boundary_angles,
            boundary_eps: self.grid.boundary_eps,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn budget(&self) -> Budget {
        Budget {
            starts: self.budget.starts,
            max_iters: self.budget.max_iters,
            seed: self.budget.seed,
        }
    }

    /// Checks every section, so a bad config fails before any work starts.
    pub fn validate(&self) -> Result<()> {
        self.tolerance()?;
        self.grid()?;
        if self.budget.starts == 0 {
            return Err(CliError::Config("budget.starts must be at least 1".into()));
        }
        if self.depth == 0 {
            return Err(CliError::Config("depth must be at least 1".into()));
        }
        Ok(())
    }
}

/// Overrides collected from command-line flags; `None` keeps the value from
/// the config file (or the default).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub rank_tol: Option<f64>,
    pub residual_tol: Option<f64>,
    pub grid_radii: Option<Vec<f64>>,
    pub grid_angles: Option<usize>,
    pub boundary_angles: Option<usize>,
    pub boundary_eps: Option<f64>,
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub max_iters: Option<usize>,
    pub depth: Option<usize>,
    pub word_length: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, config: &mut Config) {
        fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
            if let Some(v) = value {
                *slot = v.clone();
            }
        }
        set(&mut config.tolerance.rank_tol, &self.rank_tol);
        set(&mut config.tolerance.residual_tol, &self.residual_tol);
        set(&mut config.grid.radii, &self.grid_radii);
        set(&mut config.grid.angles, &self.grid_angles);
        set(&mut config.grid.boundary_angles, &self.boundary_angles);
        set(&mut config.grid.boundary_eps, &self.boundary_eps);
        set(&mut config.budget.seed, &self.seed);
        set(&mut config.budget.starts, &self.starts);
        set(&mut config.budget.max_iters, &self.max_iters);
        set(&mut config.depth, &self.depth);
        set(&mut config.word_length, &self.word_length);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = Config::default();
        c.validate().unwrap();
        assert_eq!(c.tolerance().unwrap(), Tolerance::default());
        assert_eq!(c.grid().unwrap(), GridSpec::default());
        assert_eq!(c.budget(), Budget::default());
    }

    #[test]
    fn overrides_win() {
        let mut c = Config::default();
        Overrides {
            seed: Some(7),
            grid_radii: Some(vec![0.5]),
            ..Default::default()
        }
        .apply(&mut c);
        assert_eq!(c.budget.seed, 7);
        assert_eq!(c.grid.radii, vec![0.5]);
        assert_eq!(c.depth, DEFAULT_DEPTH);
    }

    #[test]
    fn bad_values_are_rejected() {
        let mut c = Config::default();
        c.tolerance.rank_tol = 2.0;
        assert!(c.validate().is_err());
        let c = Config {
            depth: 0,
            ..Config::default()
        };
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
    }
}
