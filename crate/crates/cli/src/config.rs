use std::path::PathBuf;

use anyhow::{bail, Result};
use gfmmd::{Engine, KernelSpec};
use serde::{Deserialize, Serialize};

/// Everything a run depends on, resolved from the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: String,
    pub inputs: Vec<PathBuf>,
    pub engine: Engine,
    pub kernel: KernelSpec,
    pub k_nn: usize,
    pub tau_mass: f64,
    pub seed: Option<u64>,
    pub outputs: Vec<PathBuf>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.engine.validate()?;
        self.kernel.validate()?;
        if self.k_nn == 0 {
            bail!("--knn must be at least 1");
        }
        if !(self.tau_mass >= 0.0 && self.tau_mass.is_finite()) {
            bail!(
                "--mass-tol must be a nonnegative number, got {}",
                self.tau_mass
            );
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    #[cfg(test)]
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }
}

/// Combines `--engine`, `--order` and `--epsilon` into one engine.
///
/// `--engine cheby` takes its order from `--order` (default 64); `cheby:N`
/// fixes it. `--epsilon` is relative to the estimated largest eigenvalue.
pub fn resolve_engine(engine: &str, order: Option<usize>, epsilon: Option<f64>) -> Result<Engine> {
    let resolved = match engine {
        "exact" => {
            if order.is_some() || epsilon.is_some() {
                bail!("--order and --epsilon only apply to the Chebyshev engine");
            }
            Engine::Exact
        }
        "cheby" => Engine::chebyshev(order.unwrap_or(DEFAULT_ORDER)),
        other => {
            let parsed: Engine = other.parse()?;
            if let (Engine::Chebyshev { order: a, .. }, Some(b)) = (parsed, order) {
                if a != b {
                    bail!("--engine {other} conflicts with --order {b}");
                }
            }
            parsed
        }
    };
    let resolved = match (resolved, epsilon) {
        (Engine::Chebyshev { order, .. }, Some(epsilon_rel)) => {
            Engine::Chebyshev { order, epsilon_rel }
        }
        (e, _) => e,
    };
    resolved.validate()?;
    Ok(resolved)
}

pub const DEFAULT_ORDER: usize = 64;
