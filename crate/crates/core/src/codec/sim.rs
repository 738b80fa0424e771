//! Monte Carlo harness: many independent blocks through encode, map, channel and decode.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::codebook::{generate_codebook, Codebook, CodebookConfig};
use super::ops::{apply_f, ChannelSampler, Decoded, Decoder, Encoded, Encoder};
use super::sampling::Sampler;
use crate::channel::{
    induced_joint, require_scenario, AuxiliaryScheme, ContextModel, Scenario, SemanticChannel, Q0, Q1T,
    Q2T, U, X,
};
use crate::error::{config_err, Result};
use crate::oracle::MlDecoder;
use crate::prob::{JointPmf, Pmf};
use crate::scalar::Real;
use crate::seed::derive_seed;

const CODEBOOK_STREAM: u64 = 0xc0de;
const TRIAL_STREAM: u64 = 0x7e57;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Success,
    /// No sequence in the semantic's bin was typical with the sender context.
    EncoderFailure,
    DecoderNoneTypical,
    DecoderAmbiguous,
    /// The decoder settled on a unique sequence from another bin.
    WrongBin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub w: usize,
    pub q0: Vec<u8>,
    pub q1t: Vec<u8>,
    pub q2t: Vec<u8>,
    pub outcome: Outcome,
    /// Bin picked by the maximum-likelihood baseline, when it ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ml_bin: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOptions {
    /// Trials sharing one freshly drawn codebook.
    pub block_size: usize,
    /// Also decode every block with the maximum-likelihood oracle.
    pub ml_baseline: bool,
    pub keep_records: bool,
}

impl Default for TrialOptions {
    fn default() -> Self {
        Self {
            block_size: 100,
            ml_baseline: false,
            keep_records: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub success: u64,
    pub enc_fail: u64,
    pub none_typ: u64,
    pub ambiguous: u64,
    pub wrong_bin: u64,
}

impl OutcomeCounts {
    pub fn record(&mut self, o: Outcome) {
        match o {
            Outcome::Success => self.success += 1,
            Outcome::EncoderFailure => self.enc_fail += 1,
            Outcome::DecoderNoneTypical => self.none_typ += 1,
            Outcome::DecoderAmbiguous => self.ambiguous += 1,
            Outcome::WrongBin => self.wrong_bin += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.success + self.enc_fail + self.none_typ + self.ambiguous + self.wrong_bin
    }

    pub fn failures(&self) -> u64 {
        self.total() - self.success
    }

    fn merge(mut self, o: Self) -> Self {
        self.success += o.success;
        self.enc_fail += o.enc_fail;
        self.none_typ += o.none_typ;
        self.ambiguous += o.ambiguous;
        self.wrong_bin += o.wrong_bin;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub n: usize,
    pub rate: f64,
    pub rate_tilde: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub trials: u64,
    pub counts: OutcomeCounts,
    /// `1 - success / trials`; zero for an empty run.
    pub error_rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    /// Trials the maximum-likelihood baseline decoded to the wrong bin.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ml_errors: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub records: Vec<TrialRecord>,
}

pub const SIM_CSV_HEADER: &str =
    "n,R,Rtilde,epsilon,trials,success,enc_fail,none_typ,ambiguous,wrong_bin,error_rate,wilson_lo,wilson_hi,seed";

impl SimResult {
    pub fn from_counts(cfg: &CodebookConfig, counts: OutcomeCounts, ml_errors: Option<u64>) -> Self {
        let trials = counts.total();
        let errors = counts.failures();
        let (lo, hi) = wilson_interval(errors, trials);
        Self {
            n: cfg.n,
            rate: cfg.rate,
            rate_tilde: cfg.rate_tilde,
            epsilon: cfg.epsilon,
            seed: cfg.seed,
            trials,
            counts,
            error_rate: if trials == 0 { 0.0 } else { errors as f64 / trials as f64 },
            wilson_lo: lo,
            wilson_hi: hi,
            ml_errors,
            records: Vec::new(),
        }
    }

    /// One CSV row in [`SIM_CSV_HEADER`] column order, no trailing newline.
    pub fn csv_row(&self) -> String {
        let c = &self.counts;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.rate,
            self.rate_tilde,
            self.epsilon,
            self.trials,
            c.success,
            c.enc_fail,
            c.none_typ,
            c.ambiguous,
            c.wrong_bin,
            self.error_rate,
            self.wilson_lo,
            self.wilson_hi,
            self.seed
        )
    }

    pub fn ml_error_rate(&self) -> Option<f64> {
        self.ml_errors
            .map(|e| if self.trials == 0 { 0.0 } else { e as f64 / self.trials as f64 })
    }
}

/// 95% Wilson score interval for `k` successes in `n` trials; `(0, 1)` when `n = 0`.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    let lo = if k == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Everything a block of trials needs, derived once from the model.
pub struct TrialSetup<T> {
    pub scheme: AuxiliaryScheme<T>,
    pub pu: Pmf<T>,
    /// Law of `(u, q0, q1t)` the encoder tests against.
    pub encoder_reference: JointPmf<T>,
    /// Law of `(u, x, q0, q2t)` the decoder tests against.
    pub decoder_reference: JointPmf<T>,
    context: Sampler,
    dims: [usize; 3],
    channel: ChannelSampler,
    ml: MlDecoder,
}

impl<T: Real> TrialSetup<T> {
    pub fn new(
        ch: &SemanticChannel<T>,
        ctx: &ContextModel<T>,
        scheme: &AuxiliaryScheme<T>,
        scenario: Scenario,
    ) -> Result<Self> {
        require_scenario(ctx, scenario)?;
        let joint = induced_joint(ch, ctx, scheme)?;
        for a in joint.vars() {
            if a.size() > 256 {
                return Err(config_err!("codec alphabets are limited to 256 symbols; `{}` has {}", a.name(), a.size()));
            }
        }
        Ok(Self {
            scheme: scheme.clone(),
            pu: joint.pmf_of(U)?,
            encoder_reference: joint.marginalize(&[U, Q0, Q1T])?,
            decoder_reference: joint.marginalize(&[U, X, Q0, Q2T])?,
            context: Sampler::new(ctx.joint().probs()),
            dims: [ctx.q0().size(), ctx.q1_extra().size(), ctx.q2_extra().size()],
            channel: ChannelSampler::new(ch),
            ml: MlDecoder::new(ch, ctx, scheme)?,
        })
    }

    /// Draw an i.i.d. context realization `(q0^n, q1t^n, q2t^n)`.
    pub fn sample_context<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> [Vec<u8>; 3] {
        let [_, d1, d2] = self.dims;
        let mut out = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
        for _ in 0..n {
            let cell = self.context.sample(rng);
            out[0].push((cell / (d1 * d2)) as u8);
            out[1].push(((cell / d2) % d1) as u8);
            out[2].push((cell % d2) as u8);
        }
        out
    }

    pub fn ml_decoder(&self) -> &MlDecoder {
        &self.ml
    }
}

/// One pass through the scheme for semantic `w`.
///
/// On encoder failure the first sequence of bin `w` is sent and the trial is
/// recorded as [`Outcome::EncoderFailure`] whatever the decoder does.
#[allow(clippy::too_many_arguments)]
pub fn run_trial<T: Real, R: Rng + ?Sized>(
    setup: &TrialSetup<T>,
    codebook: &Codebook,
    encoder: &mut Encoder,
    decoder: &mut Decoder,
    with_ml: bool,
    w: usize,
    rng: &mut R,
) -> Result<TrialRecord> {
    let n = codebook.n();
    let [q0, q1t, q2t] = setup.sample_context(n, rng);
    let (index, enc_failed) = match encoder.encode(w, &q0, &q1t, codebook)? {
        Encoded::Found(i) => (i, false),
        Encoded::Failure => (codebook.bin(w).start, true),
    };
    let s = apply_f(codebook.sequence(index), &q0, &q1t, &setup.scheme)?;
    let x = setup.channel.transmit(&s, &q0, &q1t, rng);
    let outcome = if enc_failed {
        Outcome::EncoderFailure
    } else {
        match decoder.decode(&x, &q0, &q2t, codebook)? {
            Decoded::Unique { bin, .. } if bin == w => Outcome::Success,
            Decoded::Unique { .. } => Outcome::WrongBin,
            Decoded::NoneTypical => Outcome::DecoderNoneTypical,
            Decoded::Ambiguous => Outcome::DecoderAmbiguous,
        }
    };
    let ml_bin = with_ml.then(|| setup.ml.decode(&x, &q0, &q2t, codebook));
    Ok(TrialRecord {
        w,
        q0,
        q1t,
        q2t,
        outcome,
        ml_bin,
    })
}

/// Run `trials` independent blocks; a fresh codebook is drawn every `block_size` trials.
///
/// Seeds for codebooks and trials are derived from `cfg.seed` and their
/// indices, so the result does not depend on how the work is scheduled.
pub fn run_trials<T: Real>(
    ch: &SemanticChannel<T>,
    ctx: &ContextModel<T>,
    scheme: &AuxiliaryScheme<T>,
    scenario: Scenario,
    cfg: &CodebookConfig,
    trials: u64,
    opts: &TrialOptions,
) -> Result<SimResult> {
    let setup = TrialSetup::new(ch, ctx, scheme, scenario)?;
    run_trials_with(&setup, cfg, trials, opts)
}

pub fn run_trials_with<T: Real>(
    setup: &TrialSetup<T>,
    cfg: &CodebookConfig,
    trials: u64,
    opts: &TrialOptions,
) -> Result<SimResult> {
    cfg.sizes()?;
    let block = opts.block_size.max(1) as u64;
    let blocks = trials.div_ceil(block);
    let ml = opts.ml_baseline;
    if ml && cfg.sizes()?.0 > crate::oracle::ML_MAX_CODEWORDS {
        return Err(crate::Error::Resource(format!(
            "maximum-likelihood baseline is limited to {} codewords",
            crate::oracle::ML_MAX_CODEWORDS
        )));
    }
    let per_block: Vec<Result<(OutcomeCounts, u64, Vec<TrialRecord>)>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut cb_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[CODEBOOK_STREAM, b]));
            let codebook = generate_codebook(&setup.pu, cfg, &mut cb_rng)?;
            let mut encoder = Encoder::new(&setup.encoder_reference, cfg.epsilon, cfg.n);
            let mut decoder = Decoder::new(&setup.decoder_reference, cfg.epsilon, cfg.n);
            let mut counts = OutcomeCounts::default();
            let mut ml_err = 0;
            let mut records = Vec::new();
            for t in b * block..((b + 1) * block).min(trials) {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[TRIAL_STREAM, t]));
                let w = rng.random_range(0..codebook.num_bins());
                let rec = run_trial(setup, &codebook, &mut encoder, &mut decoder, ml, w, &mut rng)?;
                counts.record(rec.outcome);
                if rec.ml_bin.is_some_and(|m| m != w) {
                    ml_err += 1;
                }
                if opts.keep_records {
                    records.push(rec);
                }
            }
            Ok((counts, ml_err, records))
        })
        .collect();
    let mut counts = OutcomeCounts::default();
    let mut ml_errors = 0;
    let mut records = Vec::new();
    for r in per_block {
        let (c, m, recs) = r?;
        counts = counts.merge(c);
        ml_errors += m;
        records.extend(recs);
    }
    let mut result = SimResult::from_counts(cfg, counts, ml.then_some(ml_errors));
    result.records = records;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 5 of 10: center 0.5, half-width z sqrt(0.025 + z^2/400) / (1 + z^2/10)
        let (lo, hi) = wilson_interval(5, 10);
        assert!((lo - 0.236_593).abs() < 1e-5, "{lo}");
        assert!((hi - 0.763_407).abs() < 1e-5, "{hi}");
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036_994).abs() < 1e-5, "{hi}");
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }

    #[test]
    fn csv_row_has_header_arity() {
        let cfg = CodebookConfig::new(8, 0.25, 0.5, 0.5, 3);
        let r = SimResult::from_counts(&cfg, OutcomeCounts::default(), None);
        assert_eq!(
            r.csv_row().split(',').count(),
            SIM_CSV_HEADER.split(',').count()
        );
        assert_eq!(r.csv_row(), "8,0.25,0.5,0.5,0,0,0,0,0,0,0,0,1,3");
    }

    fn noiseless_binary() -> (SemanticChannel<f64>, ContextModel<f64>, AuxiliaryScheme<f64>) {
        use crate::prob::Alphabet;
        let ctx = ContextModel::trivial();
        let s = Alphabet::indexed("s", 2).unwrap();
        let ch = SemanticChannel::context_free(
            &ctx,
            s.clone(),
            Alphabet::indexed("x", 2).unwrap(),
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let scheme = AuxiliaryScheme::direct(&ctx, s, &[vec![0.5, 0.5]]).unwrap();
        (ch, ctx, scheme)
    }

    #[test]
    fn empty_run_has_zero_counts() {
        let (ch, ctx, sc) = noiseless_binary();
        let cfg = CodebookConfig::new(8, 0.25, 0.25, 0.5, 1);
        let r = run_trials(&ch, &ctx, &sc, Scenario::FullShared, &cfg, 0, &TrialOptions::default()).unwrap();
        assert_eq!(r.trials, 0);
        assert_eq!(r.counts, OutcomeCounts::default());
        assert_eq!(r.error_rate, 0.0);
    }

    #[test]
    fn outcomes_partition_trials_and_runs_repeat() {
        let (ch, ctx, sc) = noiseless_binary();
        let cfg = CodebookConfig::new(8, 0.5, 0.5, 0.6, 17);
        let opts = TrialOptions {
            block_size: 7,
            ml_baseline: true,
            keep_records: true,
        };
        let a = run_trials(&ch, &ctx, &sc, Scenario::FullShared, &cfg, 250, &opts).unwrap();
        let b = run_trials(&ch, &ctx, &sc, Scenario::FullShared, &cfg, 250, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.total(), 250);
        assert_eq!(a.records.len(), 250);
        assert!(a.wilson_lo <= a.error_rate && a.error_rate <= a.wilson_hi);
        // noiseless channel: ML only errs on duplicate codewords, never more often than typicality decoding
        assert!(a.ml_errors.unwrap() <= a.counts.failures());
    }

    #[test]
    fn scenario_must_match_context() {
        let (ch, ctx, sc) = noiseless_binary();
        // a trivial context is valid for every scenario
        for s in Scenario::ALL {
            assert!(TrialSetup::new(&ch, &ctx, &sc, s).is_ok());
        }
    }
}
