//! Run configuration: one JSON document, optionally overridden by flags.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use vqls_core::problem::ProblemSpec;
use vqls_core::spsa::SpsaConfig;
use vqls_core::vqls::{AnsatzConfig, Estimator, SolveOptions};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub ansatz: AnsatzConfig,
    /// `spsa.seed` is not used; each member is seeded from `base_seed`.
    pub spsa: SpsaConfig,
    pub mode: Estimator,
    pub ensemble_size: usize,
    /// Member `i` runs with seed `base_seed + i`.
    pub base_seed: u64,
    /// Only write the classical and analytic references.
    pub classical_only: bool,
    /// Parallel ensemble members; `None` uses every core.
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::reference_case(),
            ansatz: AnsatzConfig::default(),
            spsa: SpsaConfig::default(),
            mode: Estimator::Exact,
            ensemble_size: 24,
            base_seed: 0,
            classical_only: false,
            workers: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::json(path, e))
    }

    pub fn validate(&self) -> Result<()> {
        self.problem.validate()?;
        self.spsa.validate()?;
        if self.ensemble_size == 0 {
            return Err(CliError::Config("ensemble_size must be at least 1".into()));
        }
        if self.mode == Estimator::Shots(0) {
            return Err(CliError::Config("shots must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn member_seed(&self, member: usize) -> u64 {
        self.base_seed.wrapping_add(member as u64)
    }

    pub fn solve_options(&self, member: usize) -> SolveOptions {
        SolveOptions {
            ansatz: self.ansatz,
            spsa: self.spsa.clone(),
            estimator: self.mode,
            seed: self.member_seed(member),
        }
    }
}

/// `--shots` value: a positive count or `exact`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotsArg(pub Estimator);

impl FromStr for ShotsArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("exact") {
            return Ok(ShotsArg(Estimator::Exact));
        }
        match s.parse::<u32>() {
            Ok(0) => Err("shots must be at least 1".into()),
            Ok(n) => Ok(ShotsArg(Estimator::Shots(n))),
            Err(_) => Err(format!("expected a shot count or `exact`, got `{s}`")),
        }
    }
}
