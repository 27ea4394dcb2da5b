// SPDX-License-Identifier: MIT OR Apache-2.0

//! Defaults shared by the command line and library callers.

use crate::oracles::DEFAULT_SCAN_BUDGET;
use crate::transfer::{DEFAULT_COSET_BUDGET, DEFAULT_DM_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    JsonLines,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Coset probes per `f` multiplication.
    pub coset_budget: u64,
    /// Probes per `D_m` check.
    pub dm_budget: u64,
    /// Steps for identity and inverse scans.
    pub scan_budget: u64,
    pub window: u64,
    pub seed: u64,
    pub format: OutputFormat,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            coset_budget: DEFAULT_COSET_BUDGET,
            dm_budget: DEFAULT_DM_BUDGET,
            scan_budget: DEFAULT_SCAN_BUDGET,
            window: 8,
            seed: 0,
            format: OutputFormat::Text,
        }
    }
}

impl Config {
    /// One probe budget for every bounded search.
    pub fn with_budget(mut self, budget: u64) -> Config {
        assert!(budget >= 1, "budgets must be at least 1");
        self.coset_budget = budget;
        self.dm_budget = budget;
        self
    }
}
