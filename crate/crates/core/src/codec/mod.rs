//! Random-binning codec with strong joint typicality, plus a Monte Carlo harness.
//!
//! Codebooks hold `⌈2^{nR̃}⌉` i.i.d. sequences split into `⌈2^{nR}⌉` bins of
//! consecutive indices. Symbols are stored as `u8`, so every alphabet the codec
//! touches is limited to 256 symbols.

mod codebook;
mod ops;
mod sampling;
mod sim;
mod sweep;
mod typical;

pub use codebook::{generate_codebook, pow2_ceil, Codebook, CodebookConfig, DEFAULT_MEM_BUDGET};
pub use ops::{apply_f, decode, encode, transmit, ChannelSampler, Decoded, Decoder, Encoded, Encoder};
pub use sampling::Sampler;
pub use sim::{
    run_trial, run_trials, run_trials_with, wilson_interval, Outcome, OutcomeCounts, SimResult,
    TrialOptions, TrialRecord, TrialSetup, SIM_CSV_HEADER,
};
pub use sweep::{cell_seed, rate_sweep, RatePoint, SweepCell, SweepSpec, SweepTable};
pub use typical::{typicality_test, TypicalityChecker};
