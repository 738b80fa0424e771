//! The per-block steps of the binning scheme: encode, map, transmit, decode.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::codebook::Codebook;
use super::sampling::Sampler;
use super::typical::TypicalityChecker;
use crate::channel::{AuxiliaryScheme, SemanticChannel};
use crate::error::{Error, Result};
use crate::prob::JointPmf;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Encoded {
    /// Index of the first sequence in the bin that is typical with the sender context.
    Found(usize),
    Failure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decoded {
    Unique { bin: usize, index: usize },
    NoneTypical,
    /// Two or more typical sequences, even if they share a bin.
    Ambiguous,
}

fn check_len(what: &str, seq: &[u8], n: usize) -> Result<()> {
    if seq.len() != n {
        return Err(Error::Usage(format!("{what} has length {}, expected {n}", seq.len())));
    }
    Ok(())
}

/// Encoder for one codebook and one reference law over `(u, q0, q1t)`.
#[derive(Debug, Clone)]
pub struct Encoder {
    checker: TypicalityChecker,
}

impl Encoder {
    pub fn new<T: Real>(reference: &JointPmf<T>, epsilon: f64, n: usize) -> Self {
        Self {
            checker: TypicalityChecker::new(reference, epsilon, n),
        }
    }

    pub fn encode(&mut self, w: usize, q0: &[u8], q1t: &[u8], codebook: &Codebook) -> Result<Encoded> {
        let n = codebook.n();
        if w >= codebook.num_bins() {
            return Err(Error::Usage(format!("semantic {w} out of range for {} bins", codebook.num_bins())));
        }
        check_len("q0 sequence", q0, n)?;
        check_len("q1t sequence", q1t, n)?;
        let offsets = self.checker.offsets(&[(1, q0), (2, q1t)]);
        let su = self.checker.stride(0);
        for i in codebook.bin(w) {
            if self.checker.check_with_offsets(codebook.sequence(i), su, &offsets) {
                return Ok(Encoded::Found(i));
            }
        }
        Ok(Encoded::Failure)
    }
}

/// Decoder for one codebook and one reference law over `(u, x, q0, q2t)`.
#[derive(Debug, Clone)]
pub struct Decoder {
    checker: TypicalityChecker,
}

impl Decoder {
    pub fn new<T: Real>(reference: &JointPmf<T>, epsilon: f64, n: usize) -> Self {
        Self {
            checker: TypicalityChecker::new(reference, epsilon, n),
        }
    }

    pub fn decode(&mut self, x: &[u8], q0: &[u8], q2t: &[u8], codebook: &Codebook) -> Result<Decoded> {
        let n = codebook.n();
        check_len("x sequence", x, n)?;
        check_len("q0 sequence", q0, n)?;
        check_len("q2t sequence", q2t, n)?;
        let offsets = self.checker.offsets(&[(1, x), (2, q0), (3, q2t)]);
        let su = self.checker.stride(0);
        let mut found = None;
        for (i, u) in codebook.sequences().enumerate() {
            if self.checker.check_with_offsets(u, su, &offsets) {
                if found.is_some() {
                    return Ok(Decoded::Ambiguous);
                }
                found = Some(i);
            }
        }
        Ok(match found {
            Some(index) => Decoded::Unique {
                bin: codebook.bin_of(index),
                index,
            },
            None => Decoded::NoneTypical,
        })
    }
}

/// Find the first sequence in bin `w` jointly typical with `(q0, q1t)` under `reference` over `(u, q0, q1t)`.
pub fn encode<T: Real>(
    w: usize,
    q0: &[u8],
    q1t: &[u8],
    codebook: &Codebook,
    reference: &JointPmf<T>,
    epsilon: f64,
) -> Result<Encoded> {
    Encoder::new(reference, epsilon, codebook.n()).encode(w, q0, q1t, codebook)
}

/// Look for the unique codeword jointly typical with `(x, q0, q2t)` under `reference` over `(u, x, q0, q2t)`.
pub fn decode<T: Real>(
    x: &[u8],
    q0: &[u8],
    q2t: &[u8],
    codebook: &Codebook,
    reference: &JointPmf<T>,
    epsilon: f64,
) -> Result<Decoded> {
    Decoder::new(reference, epsilon, codebook.n()).decode(x, q0, q2t, codebook)
}

/// `s_i = f(u_i, q0_i, q1t_i)`.
pub fn apply_f<T: Real>(u: &[u8], q0: &[u8], q1t: &[u8], scheme: &AuxiliaryScheme<T>) -> Result<Vec<u8>> {
    check_len("q0 sequence", q0, u.len())?;
    check_len("q1t sequence", q1t, u.len())?;
    Ok(u
        .iter()
        .zip(q0.iter().zip(q1t))
        .map(|(u, (a, b))| scheme.f(*u as usize, *a as usize, *b as usize) as u8)
        .collect())
}

/// Per-row samplers for a channel law.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    n1: usize,
    ns: usize,
    rows: Vec<Sampler>,
}

impl ChannelSampler {
    pub fn new<T: Real>(ch: &SemanticChannel<T>) -> Self {
        let (n0, n1, ns) = (ch.q0().size(), ch.q1_extra().size(), ch.s().size());
        let mut rows = Vec::with_capacity(n0 * n1 * ns);
        for a in 0..n0 {
            for b in 0..n1 {
                for s in 0..ns {
                    rows.push(Sampler::new(ch.row(a, b, s)));
                }
            }
        }
        Self { n1, ns, rows }
    }

    pub fn transmit<R: Rng + ?Sized>(&self, s: &[u8], q0: &[u8], q1t: &[u8], rng: &mut R) -> Vec<u8> {
        s.iter()
            .zip(q0.iter().zip(q1t))
            .map(|(s, (a, b))| {
                let r = (*a as usize * self.n1 + *b as usize) * self.ns + *s as usize;
                self.rows[r].sample(rng) as u8
            })
            .collect()
    }
}

/// Draw `x_i ~ p(. | s_i, q0_i, q1t_i)` independently per position.
pub fn transmit<T: Real, R: Rng + ?Sized>(
    s: &[u8],
    q0: &[u8],
    q1t: &[u8],
    ch: &SemanticChannel<T>,
    rng: &mut R,
) -> Result<Vec<u8>> {
    check_len("q0 sequence", q0, s.len())?;
    check_len("q1t sequence", q1t, s.len())?;
    Ok(ChannelSampler::new(ch).transmit(s, q0, q1t, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ContextModel;
    use crate::prob::Alphabet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bits(name: &str) -> Alphabet {
        Alphabet::indexed(name, 2).unwrap()
    }

    fn uniform_u_ref() -> JointPmf<f64> {
        JointPmf::new(
            vec![bits("u"), Alphabet::degenerate("q0"), Alphabet::degenerate("q1t")],
            vec![0.5, 0.5],
        )
        .unwrap()
    }

    fn noiseless_ref() -> JointPmf<f64> {
        // (u, x, q0, q2t) with x = u
        JointPmf::new(
            vec![bits("u"), bits("x"), Alphabet::degenerate("q0"), Alphabet::degenerate("q2t")],
            vec![0.5, 0.0, 0.0, 0.5],
        )
        .unwrap()
    }

    #[test]
    fn encoder_picks_first_typical_in_bin() {
        let seqs = vec![vec![0, 0, 0, 0], vec![0, 1, 0, 1], vec![1, 1, 1, 1], vec![1, 1, 0, 0]];
        let cb = Codebook::from_sequences(4, &seqs, 2).unwrap();
        let z = vec![0u8; 4];
        let r = uniform_u_ref();
        assert_eq!(encode(0, &z, &z, &cb, &r, 0.1).unwrap(), Encoded::Found(1));
        assert_eq!(encode(1, &z, &z, &cb, &r, 0.1).unwrap(), Encoded::Found(3));
        let bad = Codebook::from_sequences(4, &[vec![0, 0, 0, 0], vec![1, 1, 1, 0]], 1).unwrap();
        assert_eq!(encode(0, &z, &z, &bad, &r, 0.1).unwrap(), Encoded::Failure);
        assert!(encode(2, &z, &z, &cb, &r, 0.1).is_err());
    }

    #[test]
    fn single_sequence_codebook_decodes_to_its_bin() {
        let cb = Codebook::from_sequences(4, &[vec![0, 1, 1, 0]], 1).unwrap();
        let z = vec![0u8; 4];
        let d = decode(&[0, 1, 1, 0], &z, &z, &cb, &noiseless_ref(), 0.1).unwrap();
        assert_eq!(d, Decoded::Unique { bin: 0, index: 0 });
        let d = decode(&[1, 1, 1, 0], &z, &z, &cb, &noiseless_ref(), 0.1).unwrap();
        assert_eq!(d, Decoded::NoneTypical);
    }

    #[test]
    fn identical_sequences_in_two_bins_are_ambiguous() {
        let s = vec![0, 1, 0, 1];
        let cb = Codebook::from_sequences(4, &[s.clone(), s.clone()], 2).unwrap();
        let z = vec![0u8; 4];
        assert_eq!(decode(&s, &z, &z, &cb, &noiseless_ref(), 0.1).unwrap(), Decoded::Ambiguous);
        assert!(decode(&s[..3], &z, &z, &cb, &noiseless_ref(), 0.1).is_err());
    }

    #[test]
    fn apply_f_identity_constant_and_stuck_at() {
        let ctx = ContextModel::trivial();
        let id = AuxiliaryScheme::from_fns(&ctx, bits("u"), bits("s"), |_, _| vec![0.5, 0.5], |u, _, _| u).unwrap();
        let u = vec![0, 1, 1, 0, 1];
        let z = vec![0u8; 5];
        assert_eq!(apply_f(&u, &z, &z, &id).unwrap(), u);
        let c = AuxiliaryScheme::from_fns(&ctx, bits("u"), bits("s"), |_, _| vec![0.5, 0.5], |_, _, _| 1).unwrap();
        assert_eq!(apply_f(&u, &z, &z, &c).unwrap(), vec![1; 5]);

        // defects: 0 free, 1 stuck-at-0, 2 stuck-at-1; the writer passes u through
        let q1 = Alphabet::new("q1t", ["free", "stuck0", "stuck1"]).unwrap();
        let dctx = ContextModel::new(Alphabet::degenerate("q0"), q1, Alphabet::degenerate("q2t"), vec![0.5, 0.25, 0.25])
            .unwrap();
        let w = AuxiliaryScheme::from_fns(
            &dctx,
            bits("u"),
            bits("s"),
            |_, b| match b {
                0 => vec![0.5, 0.5],
                1 => vec![1.0, 0.0],
                _ => vec![0.0, 1.0],
            },
            |u, _, _| u,
        )
        .unwrap();
        let u = vec![1, 0, 1, 1, 0, 0, 1, 0];
        let d = vec![0, 1, 2, 0, 2, 1, 0, 0];
        let z = vec![0u8; 8];
        assert_eq!(apply_f(&u, &z, &d, &w).unwrap(), u);
    }

    #[test]
    fn transmit_noiseless_uniform_and_reproducible() {
        let ctx = ContextModel::trivial();
        let id = SemanticChannel::context_free(&ctx, bits("s"), bits("x"), &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = vec![0, 1, 1, 0, 1, 0];
        let z = vec![0u8; 6];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(transmit(&s, &z, &z, &id, &mut rng).unwrap(), s);

        let x4 = Alphabet::indexed("x", 4).unwrap();
        let unif = SemanticChannel::context_free(&ctx, bits("s"), x4, &[vec![0.25; 4], vec![0.25; 4]]).unwrap();
        let n = 10_000;
        let s = vec![0u8; n];
        let z = vec![0u8; n];
        let x = transmit(&s, &z, &z, &unif, &mut rng).unwrap();
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        for k in 0..4u8 {
            let c = x.iter().filter(|v| **v == k).count() as f64;
            assert!((c - n as f64 / 4.0).abs() < 3.0 * sigma, "symbol {k}: {c}");
        }
        let a = transmit(&s, &z, &z, &unif, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = transmit(&s, &z, &z, &unif, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}
