//! Study configuration: a TOML file whose keys override per-study defaults.
//!
//! ```toml
//! b = 0.5
//! t_grid = [50.0, 100.0, 200.0]
//! seed = 7
//!
//! [step]
//! family = "gamma"
//! shape = 1.0
//!
//! [tolerances]
//! eps_mass = 1e-12
//! ```
//!
//! Unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use decoupled_core::StepDistribution;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Study {
    Rates,
    ExactProb,
    ConvergenceT21,
    ConvergenceT22,
    ConvergenceT23,
    LightExpansionT24,
    LightExpansionT25,
    Forrester,
    LocalClt,
    VarianceAsymptotics,
    IsCompare,
    GinibreRadii,
}

impl Study {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Rates => "rates",
            Self::ExactProb => "exact-prob",
            Self::ConvergenceT21 => "convergence-t21",
            Self::ConvergenceT22 => "convergence-t22",
            Self::ConvergenceT23 => "convergence-t23",
            Self::LightExpansionT24 => "light-expansion-t24",
            Self::LightExpansionT25 => "light-expansion-t25",
            Self::Forrester => "forrester",
            Self::LocalClt => "local-clt",
            Self::VarianceAsymptotics => "variance-asymptotics",
            Self::IsCompare => "is-compare",
            Self::GinibreRadii => "ginibre-radii",
        }
    }
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Numerical settings shared by the studies.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Bound on the marginal mass `Σ_{n>N} p_n` dropped by truncation.
    pub eps_mass: f64,
    /// Admissible error bar on a point log-probability.
    pub log_prob: f64,
    /// Lattice cells on `[0, t]` for steps without closed-form marginals.
    pub lattice_cells: usize,
    /// Largest enclosure width accepted from the lattice engine.
    pub width_limit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_mass: 1e-12,
            log_prob: 1e-9,
            lattice_cells: 1 << 17,
            width_limit: 0.05,
        }
    }
}

/// Keys accepted in a config file; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    study: Option<String>,
    step: Option<StepDistribution>,
    b: Option<f64>,
    t_grid: Option<Vec<f64>>,
    b_grid: Option<Vec<f64>>,
    alpha: Option<f64>,
    rho: Option<f64>,
    n_samples: Option<u64>,
    replicas: Option<u64>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    tolerances: Option<Tolerances>,
}

/// Fully resolved study parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub study: Study,
    pub step: StepDistribution,
    pub b: f64,
    pub t_grid: Vec<f64>,
    /// Levels for the `rates` table.
    pub b_grid: Vec<f64>,
    /// Index of `J_α` for the `rates` table.
    pub alpha: f64,
    /// Exponent of the determinantal process for `ginibre-radii`.
    pub rho: f64,
    /// Importance samples per time for `is-compare`.
    pub n_samples: u64,
    /// Sampled radii configurations per time for `ginibre-radii`.
    pub replicas: u64,
    pub seed: u64,
    pub out: PathBuf,
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    /// Defaults reproducing the reference run of `study`.
    pub fn defaults(study: Study) -> Self {
        let gamma1 = StepDistribution::Gamma { shape: 1.0 };
        let (step, b, t_grid) = match study {
            Study::Rates => (gamma1, 1.0, vec![]),
            Study::ExactProb => (gamma1, 0.5, vec![50.0, 100.0, 200.0]),
            Study::ConvergenceT21 => (
                StepDistribution::Pareto {
                    alpha: 0.5,
                    scale: 1.0,
                },
                0.5,
                vec![100.0, 1000.0, 10000.0],
            ),
            Study::ConvergenceT22 => (
                StepDistribution::Pareto {
                    alpha: 3.0,
                    scale: 1.0,
                },
                0.1,
                vec![100.0, 300.0, 500.0],
            ),
            Study::ConvergenceT23 => (
                StepDistribution::WeibullType { alpha: 0.5, c: 1.0 },
                0.5,
                vec![50.0, 100.0, 200.0],
            ),
            Study::LightExpansionT24 => (gamma1, 0.5, vec![50.0, 100.0, 200.0]),
            Study::LightExpansionT25 => (gamma1, 2.0, vec![50.0, 100.0, 200.0]),
            Study::Forrester => (gamma1, 1.0, vec![50.0, 100.0, 200.0, 400.0]),
            Study::LocalClt => (gamma1, 1.0, vec![500.0, 1000.0, 2000.0]),
            Study::VarianceAsymptotics => (gamma1, 1.0, vec![1000.0, 10000.0]),
            Study::IsCompare => (gamma1, 0.5, vec![100.0]),
            Study::GinibreRadii => (
                StepDistribution::Gamma { shape: 1.0 },
                0.5,
                vec![5.0, 7.0, 10.0],
            ),
        };
        Self {
            study,
            step,
            b,
            t_grid,
            b_grid: vec![0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0],
            alpha: 0.5,
            rho: 2.0,
            n_samples: 100_000,
            replicas: 200,
            seed: 0,
            out: PathBuf::from(format!("{}.csv", study.name())),
            tolerances: Tolerances::default(),
        }
    }

    /// Parses TOML text on top of the defaults for `study`.
    pub fn from_toml(study: Study, text: &str) -> Result<Self, CliError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        let mut cfg = Self::defaults(study);
        if let Some(s) = raw.study {
            if s != study.name() {
                return Err(CliError::Config(format!(
                    "study: file names `{s}` but the command is `{study}`"
                )));
            }
        }
        if let Some(step) = raw.step {
            cfg.step = step
                .validated()
                .map_err(|e| CliError::Config(format!("step: {e}")))?;
        }
        macro_rules! take {
            ($($f:ident),*) => { $(if let Some(v) = raw.$f { cfg.$f = v; })* };
        }
        take!(b, t_grid, b_grid, alpha, rho, n_samples, replicas, seed, out, tolerances);
        if study == Study::GinibreRadii {
            cfg.step = StepDistribution::Gamma {
                shape: 2.0 / cfg.rho,
            };
        }
        Ok(cfg)
    }

    pub fn from_file(study: Study, path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_toml(study, &text)
    }

    /// Checks field-level invariants; study hypotheses are checked separately.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, msg: String| Err(CliError::Config(format!("{field}: {msg}")));
        if !(self.b > 0.0 && self.b.is_finite()) {
            return bad("b", format!("must be positive, got {}", self.b));
        }
        if self.study == Study::Rates {
            if self.b_grid.is_empty() {
                return bad("b_grid", "must not be empty".into());
            }
            if let Some(b) = self.b_grid.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
                return bad("b_grid", format!("levels must be positive, got {b}"));
            }
            if !(0.0..1.0).contains(&self.alpha) {
                return bad("alpha", format!("must lie in [0, 1), got {}", self.alpha));
            }
        } else {
            if self.t_grid.is_empty() {
                return bad("t_grid", "must not be empty".into());
            }
            if let Some(t) = self.t_grid.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
                return bad("t_grid", format!("times must be positive, got {t}"));
            }
            if self.t_grid.windows(2).any(|w| w[0] >= w[1]) {
                return bad("t_grid", "must be strictly increasing".into());
            }
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return bad("rho", format!("must be positive, got {}", self.rho));
        }
        if self.n_samples < 1000 {
            return bad(
                "n_samples",
                format!("must be at least 1000, got {}", self.n_samples),
            );
        }
        if self.replicas == 0 {
            return bad("replicas", "must be positive".into());
        }
        let tol = &self.tolerances;
        if !(tol.eps_mass > 0.0 && tol.eps_mass < 1.0) {
            return bad(
                "tolerances.eps_mass",
                format!("must lie in (0, 1), got {}", tol.eps_mass),
            );
        }
        if !(tol.log_prob > 0.0) {
            return bad(
                "tolerances.log_prob",
                format!("must be positive, got {}", tol.log_prob),
            );
        }
        if tol.lattice_cells < 16 {
            return bad(
                "tolerances.lattice_cells",
                format!("must be at least 16, got {}", tol.lattice_cells),
            );
        }
        if !(tol.width_limit > 0.0 && tol.width_limit <= 1.0) {
            return bad(
                "tolerances.width_limit",
                format!("must lie in (0, 1], got {}", tol.width_limit),
            );
        }
        Ok(())
    }
}
