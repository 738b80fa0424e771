//! Maximum-likelihood decoding over a whole codebook.

use crate::channel::{AuxiliaryScheme, ContextModel, SemanticChannel};
use crate::codec::Codebook;
use crate::error::Result;
use crate::scalar::Real;

/// Largest codebook the maximum-likelihood baseline will scan.
pub const ML_MAX_CODEWORDS: u64 = 1 << 12;

/// Per-symbol log-likelihoods `log2 L(x | u, q0, q2t)` where
/// `L = sum_q1t p(q1t | q0, q2t) W(x | f(u, q0, q1t), q0, q1t)`.
#[derive(Debug, Clone)]
pub struct MlDecoder {
    n2: usize,
    nu: usize,
    nx: usize,
    /// Laid out `[q0][q2t][u][x]`; `-inf` where the likelihood is zero.
    log_lik: Vec<f64>,
}

impl MlDecoder {
    pub fn new<T: Real>(ch: &SemanticChannel<T>, ctx: &ContextModel<T>, scheme: &AuxiliaryScheme<T>) -> Result<Self> {
        ch.check_against(ctx)?;
        scheme.check_against(ch, ctx)?;
        let (n0, n1, n2) = (ctx.q0().size(), ctx.q1_extra().size(), ctx.q2_extra().size());
        let (nu, nx) = (scheme.u().size(), ch.x().size());
        let mut log_lik = vec![f64::NEG_INFINITY; n0 * n2 * nu * nx];
        for a in 0..n0 {
            for c in 0..n2 {
                let pac: f64 = (0..n1).map(|b| ctx.prob(a, b, c).as_f64()).sum();
                for u in 0..nu {
                    for x in 0..nx {
                        let lik: f64 = if pac > 0.0 {
                            (0..n1)
                                .map(|b| {
                                    let post = ctx.prob(a, b, c).as_f64() / pac;
                                    post * ch.row(a, b, scheme.f(u, a, b))[x].as_f64()
                                })
                                .sum()
                        } else {
                            0.0
                        };
                        if lik > 0.0 {
                            log_lik[((a * n2 + c) * nu + u) * nx + x] = lik.log2();
                        }
                    }
                }
            }
        }
        Ok(Self { n2, nu, nx, log_lik })
    }

    /// Total log-likelihood of one codeword.
    pub fn score(&self, u: &[u8], x: &[u8], q0: &[u8], q2t: &[u8]) -> f64 {
        let mut total = 0.0;
        for i in 0..u.len() {
            let k = ((q0[i] as usize * self.n2 + q2t[i] as usize) * self.nu + u[i] as usize) * self.nx
                + x[i] as usize;
            total += self.log_lik[k];
            if total == f64::NEG_INFINITY {
                break;
            }
        }
        total
    }

    /// Bin of the most likely codeword; ties go to the lowest index.
    pub fn decode(&self, x: &[u8], q0: &[u8], q2t: &[u8], codebook: &Codebook) -> usize {
        let mut best = (f64::NEG_INFINITY, 0usize);
        for (i, u) in codebook.sequences().enumerate() {
            let s = self.score(u, x, q0, q2t);
            if s > best.0 {
                best = (s, i);
            }
        }
        codebook.bin_of(best.1)
    }
}

/// One-shot maximum-likelihood decode; builds the likelihood table each call.
pub fn ml_decode<T: Real>(
    x: &[u8],
    q0: &[u8],
    q2t: &[u8],
    codebook: &Codebook,
    scheme: &AuxiliaryScheme<T>,
    ch: &SemanticChannel<T>,
    ctx: &ContextModel<T>,
) -> Result<usize> {
    Ok(MlDecoder::new(ch, ctx, scheme)?.decode(x, q0, q2t, codebook))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Alphabet;

    fn noiseless() -> (SemanticChannel<f64>, ContextModel<f64>, AuxiliaryScheme<f64>) {
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
    fn finds_the_transmitted_codeword() {
        let (ch, ctx, scheme) = noiseless();
        let seqs = vec![vec![0, 0, 1, 1], vec![0, 1, 0, 1], vec![1, 1, 0, 0], vec![1, 0, 1, 0]];
        let cb = Codebook::from_sequences(4, &seqs, 4).unwrap();
        let z = vec![0u8; 4];
        for (i, s) in seqs.iter().enumerate() {
            assert_eq!(ml_decode(s, &z, &z, &cb, &scheme, &ch, &ctx).unwrap(), i);
        }
    }

    #[test]
    fn identical_codewords_resolve_to_bin_zero() {
        let (ch, ctx, scheme) = noiseless();
        let seqs = vec![vec![1, 0, 1]; 4];
        let cb = Codebook::from_sequences(3, &seqs, 2).unwrap();
        let z = vec![0u8; 3];
        assert_eq!(ml_decode(&[1, 0, 1], &z, &z, &cb, &scheme, &ch, &ctx).unwrap(), 0);
        // nothing matches: every score is -inf, still bin 0
        assert_eq!(ml_decode(&[0, 0, 0], &z, &z, &cb, &scheme, &ch, &ctx).unwrap(), 0);
    }
}
