//! Caps on the exponential enumerations used throughout the crate.

use crate::error::{Error, Result};

pub const PATH_LIMIT_ENV: &str = "ROBUSTFLOW_PATH_LIMIT";
pub const SCENARIO_LIMIT_ENV: &str = "ROBUSTFLOW_SCENARIO_LIMIT";
pub const SEARCH_LIMIT_ENV: &str = "ROBUSTFLOW_SEARCH_LIMIT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of paths any single enumeration may produce.
    pub max_paths: usize,
    /// Maximum number of interdiction scenarios any single enumeration may produce.
    pub max_scenarios: usize,
    /// Maximum number of nodes visited by backtracking searches.
    pub max_search_nodes: usize,
    /// Maximum vertex count accepted by the graph oracles.
    pub max_oracle_vertices: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_paths: 200_000,
            max_scenarios: 500_000,
            max_search_nodes: 20_000_000,
            max_oracle_vertices: 16,
        }
    }
}

impl Limits {
    /// Defaults overridden by the `ROBUSTFLOW_*_LIMIT` environment variables.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        for (var, slot) in [
            (PATH_LIMIT_ENV, &mut limits.max_paths),
            (SCENARIO_LIMIT_ENV, &mut limits.max_scenarios),
            (SEARCH_LIMIT_ENV, &mut limits.max_search_nodes),
        ] {
            if let Ok(text) = std::env::var(var) {
                *slot = text
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(var, format!("not a count: {text:?}")))?;
            }
        }
        Ok(limits)
    }

    pub fn unlimited() -> Self {
        Limits {
            max_paths: usize::MAX,
            max_scenarios: usize::MAX,
            max_search_nodes: usize::MAX,
            max_oracle_vertices: usize::MAX,
        }
    }

    pub(crate) fn check_paths(&self, count: usize) -> Result<()> {
        if count > self.max_paths {
            return Err(Error::resource("path enumeration", self.max_paths));
        }
        Ok(())
    }

    pub(crate) fn check_scenarios(&self, count: usize) -> Result<()> {
        if count > self.max_scenarios {
            return Err(Error::resource("scenario enumeration", self.max_scenarios));
        }
        Ok(())
    }
}
