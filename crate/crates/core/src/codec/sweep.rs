//! Grids of independent simulation runs over block length and rate.

use serde::{Deserialize, Serialize};

use super::codebook::{CodebookConfig, DEFAULT_MEM_BUDGET};
use super::sim::{run_trials_with, SimResult, TrialOptions, TrialSetup, SIM_CSV_HEADER};
use crate::channel::{AuxiliaryScheme, ContextModel, Scenario, SemanticChannel};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::seed::derive_seed;

/// One rate point of a sweep: message rate `R` and codebook rate `R̃ ≥ R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub rate: f64,
    pub rate_tilde: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub block_lengths: Vec<usize>,
    pub rates: Vec<RatePoint>,
    pub trials: u64,
    pub epsilon: f64,
    pub seed: u64,
    pub mem_budget: u64,
    pub options: TrialOptions,
}

impl SweepSpec {
    pub fn new(block_lengths: Vec<usize>, rates: Vec<RatePoint>, trials: u64, epsilon: f64, seed: u64) -> Self {
        Self {
            block_lengths,
            rates,
            trials,
            epsilon,
            seed,
            mem_budget: DEFAULT_MEM_BUDGET,
            options: TrialOptions::default(),
        }
    }

    /// Codebook configuration of cell `(n, rates[ri])`, including its derived seed.
    pub fn cell_config(&self, n: usize, ri: usize) -> CodebookConfig {
        let p = self.rates[ri];
        let mut cfg = CodebookConfig::new(n, p.rate, p.rate_tilde, self.epsilon, cell_seed(self.seed, n, ri));
        cfg.mem_budget = self.mem_budget;
        cfg
    }
}

/// Seed of sweep cell `(n, ri)` under `master`.
pub fn cell_seed(master: u64, n: usize, rate_index: usize) -> u64 {
    derive_seed(master, &[n as u64, rate_index as u64])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub n: usize,
    pub rate: f64,
    pub rate_tilde: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<SimResult>,
    /// Why the cell did not run (resource limits).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub epsilon: f64,
    pub trials: u64,
    /// Row-major over `(n, rate)` in the order given.
    pub cells: Vec<SweepCell>,
}

pub const SWEEP_CSV_HEADER_EXTRA: &str = "status";

impl SweepTable {
    pub fn csv_header() -> String {
        format!("{SIM_CSV_HEADER},{SWEEP_CSV_HEADER_EXTRA}")
    }

    /// Header plus one LF-terminated row per cell; skipped cells have empty counts.
    pub fn to_csv(&self) -> String {
        let mut out = Self::csv_header();
        out.push('\n');
        for c in &self.cells {
            match &c.result {
                Some(r) => {
                    out.push_str(&r.csv_row());
                    out.push_str(",ok");
                }
                None => out.push_str(&format!(
                    "{},{},{},{},{},,,,,,,,,{},skipped",
                    c.n, c.rate, c.rate_tilde, self.epsilon, self.trials, c.seed
                )),
            }
            out.push('\n');
        }
        out
    }

    pub fn cell(&self, n: usize, rate: f64) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.n == n && c.rate == rate)
    }

    /// Largest rate whose error rate stays below `threshold` at the largest block length that ran.
    pub fn threshold_estimate(&self, threshold: f64) -> Option<f64> {
        let n_max = self.cells.iter().filter(|c| c.result.is_some()).map(|c| c.n).max()?;
        self.cells
            .iter()
            .filter(|c| c.n == n_max)
            .filter_map(|c| c.result.as_ref().filter(|r| r.error_rate < threshold).map(|_| c.rate))
            .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |a| a.max(r))))
    }
}

/// Run every `(n, rate)` cell as an independent [`run_trials`](super::run_trials).
///
/// Cells that hit a resource limit are kept in the table as skipped; any other error aborts.
pub fn rate_sweep<T: Real>(
    ch: &SemanticChannel<T>,
    ctx: &ContextModel<T>,
    scheme: &AuxiliaryScheme<T>,
    scenario: Scenario,
    spec: &SweepSpec,
) -> Result<SweepTable> {
    let setup = TrialSetup::new(ch, ctx, scheme, scenario)?;
    let mut cells = Vec::with_capacity(spec.block_lengths.len() * spec.rates.len());
    for &n in &spec.block_lengths {
        for (ri, p) in spec.rates.iter().enumerate() {
            let cfg = spec.cell_config(n, ri);
            cfg.validate()?;
            let (result, skipped) = match run_trials_with(&setup, &cfg, spec.trials, &spec.options) {
                Ok(r) => (Some(r), None),
                Err(Error::Resource(msg)) => (None, Some(msg)),
                Err(e) => return Err(e),
            };
            cells.push(SweepCell {
                n,
                rate: p.rate,
                rate_tilde: p.rate_tilde,
                seed: cfg.seed,
                result,
                skipped,
            });
        }
    }
    Ok(SweepTable {
        epsilon: spec.epsilon,
        trials: spec.trials,
        cells,
    })
}
