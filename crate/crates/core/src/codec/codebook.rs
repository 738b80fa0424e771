use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::Sampler;
use crate::error::{config_err, Error, Result};
use crate::prob::Pmf;
use crate::scalar::Real;

/// Default cap on the total number of symbols stored in one codebook.
pub const DEFAULT_MEM_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodebookConfig {
    /// Block length.
    pub n: usize,
    /// Semantic rate `R`, bits per channel use.
    pub rate: f64,
    /// Codebook rate `R~ >= R`, bits per channel use.
    pub rate_tilde: f64,
    /// Typicality slack, in `(0, 1)`.
    pub epsilon: f64,
    pub seed: u64,
    /// Most symbols one codebook may hold.
    pub mem_budget: u64,
}

impl CodebookConfig {
    pub fn new(n: usize, rate: f64, rate_tilde: f64, epsilon: f64, seed: u64) -> Self {
        Self {
            n,
            rate,
            rate_tilde,
            epsilon,
            seed,
            mem_budget: DEFAULT_MEM_BUDGET,
        }
    }

    /// `(codewords, bins)` = `(ceil 2^{n R~}, ceil 2^{n R})`.
    pub fn sizes(&self) -> Result<(u64, u64)> {
        self.validate()?;
        let n = self.n as f64;
        let total = pow2_ceil(n * self.rate_tilde)
            .ok_or_else(|| Error::Resource(format!("2^{} codewords cannot be indexed", n * self.rate_tilde)))?;
        let bins = pow2_ceil(n * self.rate).expect("rate <= rate_tilde");
        let symbols = total.saturating_mul(self.n as u64);
        if symbols > self.mem_budget {
            return Err(Error::Resource(format!(
                "codebook of {total} sequences x {} symbols exceeds the budget of {} symbols",
                self.n, self.mem_budget
            )));
        }
        Ok((total, bins))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(config_err!("block length must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(config_err!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if self.rate.is_nan() || self.rate < 0.0 || !self.rate_tilde.is_finite() {
            return Err(config_err!("rates must be finite and nonnegative"));
        }
        if self.rate_tilde < self.rate {
            return Err(config_err!(
                "codebook rate {} is below the semantic rate {}",
                self.rate_tilde,
                self.rate
            ));
        }
        Ok(())
    }
}

/// `ceil(2^x)`, treating `x` within 1e-6 of an integer as that integer.
pub fn pow2_ceil(x: f64) -> Option<u64> {
    let r = x.round();
    let e = if (x - r).abs() < 1e-6 { r } else { x };
    if e >= 63.0 {
        return None;
    }
    Some(e.exp2().ceil().max(1.0) as u64)
}

/// Auxiliary sequences partitioned into consecutive, near-equal bins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    n: usize,
    symbols: Vec<u8>,
    /// `bin_starts[w]..bin_starts[w + 1]` are the sequences of bin `w`.
    bin_starts: Vec<usize>,
}

impl Codebook {
    /// Assemble from explicit sequences and a bin count; bins are index blocks whose sizes differ by at most one.
    pub fn from_sequences(n: usize, sequences: &[Vec<u8>], bins: usize) -> Result<Self> {
        if sequences.iter().any(|s| s.len() != n) {
            return Err(Error::Usage(format!("all codewords must have length {n}")));
        }
        if bins == 0 || bins > sequences.len() {
            return Err(config_err!("{bins} bins for {} sequences", sequences.len()));
        }
        Ok(Self {
            n,
            symbols: sequences.concat(),
            bin_starts: bin_starts(sequences.len(), bins),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.symbols.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn num_bins(&self) -> usize {
        self.bin_starts.len() - 1
    }

    pub fn sequence(&self, index: usize) -> &[u8] {
        &self.symbols[index * self.n..(index + 1) * self.n]
    }

    pub fn sequences(&self) -> impl Iterator<Item = &[u8]> {
        self.symbols.chunks(self.n)
    }

    pub fn bin(&self, w: usize) -> Range<usize> {
        self.bin_starts[w]..self.bin_starts[w + 1]
    }

    pub fn bin_of(&self, index: usize) -> usize {
        self.bin_starts.partition_point(|s| *s <= index) - 1
    }
}

fn bin_starts(total: usize, bins: usize) -> Vec<usize> {
    let base = total / bins;
    let extra = total % bins;
    let mut starts = Vec::with_capacity(bins + 1);
    let mut at = 0;
    starts.push(0);
    for b in 0..bins {
        at += base + usize::from(b < extra);
        starts.push(at);
    }
    starts
}

/// Draw `ceil 2^{n R~}` i.i.d. sequences from `pu` and split them into `ceil 2^{n R}` bins.
pub fn generate_codebook<T: Real, R: Rng + ?Sized>(
    pu: &Pmf<T>,
    cfg: &CodebookConfig,
    rng: &mut R,
) -> Result<Codebook> {
    let (total, bins) = cfg.sizes()?;
    if pu.alphabet().size() > 256 {
        return Err(config_err!("codec alphabets are limited to 256 symbols"));
    }
    let sampler = Sampler::new(pu.probs());
    let total = total as usize;
    let symbols: Vec<u8> = (0..total * cfg.n).map(|_| sampler.sample(rng) as u8).collect();
    Ok(Codebook {
        n: cfg.n,
        symbols,
        bin_starts: bin_starts(total, bins as usize),
    })
}
