use serde::{Deserialize, Serialize};

use crate::distributions::{CdfSpec, Copula, Univariate};
use crate::error::{Error, Result};
use crate::functionals::FunctionalKind;
use crate::statistics::FiniteFunctionClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// One-sample Kolmogorov-Smirnov.
    Ks1,
    /// Two-sample Kolmogorov-Smirnov.
    Ks2,
    /// One-sample Kuiper (amplitude).
    Kuiper,
    CopulaTn,
    CopulaSymmetry,
    BerkJones,
    BerkJonesNull,
    MmdFinite,
}

/// Declarative description of one experiment. Every run is a deterministic
/// function of this value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    /// Sample size of the first (or only) sample.
    pub n: usize,
    /// Size of the second sample for two-sample experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub stat_replicates: usize,
    pub limit_paths: usize,
    /// Nodes of the simulation line, or per axis of the simulation lattice.
    pub grid_nodes: usize,
    /// Law of the first sample (a copula for copula experiments).
    pub x_law: CdfSpec,
    /// Hypothesized law `G`, law of the second sample, or the copula `D`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_law: Option<CdfSpec>,
    /// Functional for `ks1` / `ks2` (default sup-norm).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<FunctionalKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<FiniteFunctionClass>,
    /// Level-set width for the limit; defaults to the tie tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Finite-difference step for copula partials (default `n^{-1/2}`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    /// Worker threads (default: available parallelism). Results do not
    /// depend on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn field_err(field: &str, reason: impl Into<String>) -> Error {
    Error::config(field, reason)
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("n", self.n),
            ("stat_replicates", self.stat_replicates),
            ("limit_paths", self.limit_paths),
        ] {
            if v == 0 {
                return Err(field_err(field, "must be at least 1"));
            }
        }
        if self.grid_nodes < 3 {
            return Err(field_err("grid_nodes", "must be at least 3"));
        }
        if let Some(e) = self.eps {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(field_err("eps", "must be finite and non-negative"));
            }
        }
        if let Some(h) = self.bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                return Err(field_err("bandwidth", "must be positive"));
            }
        }
        if self.workers == Some(0) {
            return Err(field_err("workers", "must be at least 1"));
        }
        self.x_law
            .validate()
            .map_err(|e| field_err("x_law", e.to_string()))?;
        if let Some(y) = &self.y_law {
            y.validate().map_err(|e| field_err("y_law", e.to_string()))?;
        }
        use ExperimentKind::*;
        match self.experiment {
            Ks1 | Kuiper | BerkJones => {
                self.x_univariate()?;
                self.y_univariate()?;
            }
            Ks2 => {
                self.x_univariate()?;
                self.y_univariate()?;
                self.m_size()?;
            }
            BerkJonesNull => {
                self.x_univariate()?;
                if self.n < 16 {
                    return Err(field_err("n", "the Berk-Jones null centring needs n >= 16"));
                }
            }
            CopulaTn | CopulaSymmetry => {
                self.x_copula()?;
                if self.experiment == CopulaTn {
                    self.y_copula()?;
                }
            }
            MmdFinite => {
                self.x_univariate()?;
                self.y_univariate()?;
                self.m_size()?;
                let class = self
                    .class
                    .as_ref()
                    .ok_or_else(|| field_err("class", "required for mmd-finite"))?;
                class.validate().map_err(|e| field_err("class", e.to_string()))?;
            }
        }
        if let Some(k) = self.kind {
            match self.experiment {
                Ks1 | Ks2 if k != FunctionalKind::Inf => {}
                Ks1 | Ks2 => return Err(field_err("kind", "the infimum is not a KS statistic")),
                _ => return Err(field_err("kind", "only ks1 and ks2 take a functional kind")),
            }
        }
        Ok(())
    }

    pub fn x_univariate(&self) -> Result<&Univariate> {
        match &self.x_law {
            CdfSpec::Univariate(u) => Ok(u),
            _ => Err(field_err("x_law", "expected a univariate law")),
        }
    }

    pub fn y_univariate(&self) -> Result<&Univariate> {
        match &self.y_law {
            Some(CdfSpec::Univariate(u)) => Ok(u),
            Some(_) => Err(field_err("y_law", "expected a univariate law")),
            None => Err(field_err("y_law", "required for this experiment")),
        }
    }

    pub fn x_copula(&self) -> Result<&Copula> {
        match &self.x_law {
            CdfSpec::Copula(c) if c.dim() == 2 => Ok(c),
            _ => Err(field_err("x_law", "expected a bivariate copula")),
        }
    }

    pub fn y_copula(&self) -> Result<&Copula> {
        match &self.y_law {
            Some(CdfSpec::Copula(c)) if c.dim() == 2 => Ok(c),
            _ => Err(field_err("y_law", "expected a bivariate copula")),
        }
    }

    pub fn m_size(&self) -> Result<usize> {
        match self.m {
            Some(m) if m >= 1 => Ok(m),
            _ => Err(field_err("m", "required (>= 1) for two-sample experiments")),
        }
    }

    pub fn functional(&self) -> FunctionalKind {
        match self.experiment {
            ExperimentKind::Kuiper => FunctionalKind::Amp,
            ExperimentKind::BerkJones | ExperimentKind::MmdFinite => FunctionalKind::Sup,
            _ => self.kind.unwrap_or(FunctionalKind::SupNorm),
        }
    }
}
