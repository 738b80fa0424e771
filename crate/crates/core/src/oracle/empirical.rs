//! Plug-in information estimates from samples.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Fewest samples the estimators accept.
pub const MIN_SAMPLES: usize = 1000;

fn entropy_of_counts<K>(counts: &HashMap<K, usize>, n: f64) -> f64 {
    -counts
        .values()
        .map(|c| {
            let p = *c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>()
}

fn count<K: Hash + Eq, I: Iterator<Item = K>>(it: I) -> HashMap<K, usize> {
    let mut m = HashMap::new();
    for k in it {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

fn check_len(n: usize) -> Result<f64> {
    if n < MIN_SAMPLES {
        return Err(Error::Precondition(format!(
            "empirical estimates need at least {MIN_SAMPLES} samples, got {n}"
        )));
    }
    Ok(n as f64)
}

/// Plug-in `I(A; B)` in bits from paired samples.
pub fn empirical_mi<A: Hash + Eq + Clone, B: Hash + Eq + Clone>(samples: &[(A, B)]) -> Result<f64> {
    let n = check_len(samples.len())?;
    let ha = entropy_of_counts(&count(samples.iter().map(|s| &s.0)), n);
    let hb = entropy_of_counts(&count(samples.iter().map(|s| &s.1)), n);
    let hab = entropy_of_counts(&count(samples.iter()), n);
    Ok(ha + hb - hab)
}

/// Plug-in `I(A; B | C)` in bits from sample triples.
pub fn empirical_cmi<A, B, C>(samples: &[(A, B, C)]) -> Result<f64>
where
    A: Hash + Eq,
    B: Hash + Eq,
    C: Hash + Eq,
{
    let n = check_len(samples.len())?;
    let hac = entropy_of_counts(&count(samples.iter().map(|s| (&s.0, &s.2))), n);
    let hbc = entropy_of_counts(&count(samples.iter().map(|s| (&s.1, &s.2))), n);
    let habc = entropy_of_counts(&count(samples.iter().map(|s| (&s.0, &s.1, &s.2))), n);
    let hc = entropy_of_counts(&count(samples.iter().map(|s| &s.2)), n);
    Ok(hac + hbc - habc - hc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn independent_pair_is_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s: Vec<(u8, u8)> = (0..100_000).map(|_| (rng.random_range(0..2), rng.random_range(0..2))).collect();
        assert!(empirical_mi(&s).unwrap() < 0.02);
    }

    #[test]
    fn copy_pair_is_one_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s: Vec<(u8, u8)> = (0..100_000)
            .map(|_| {
                let b = rng.random_range(0..2);
                (b, b)
            })
            .collect();
        assert!((empirical_mi(&s).unwrap() - 1.0).abs() < 0.02);
    }

    #[test]
    fn conditional_copy() {
        // A = B xor C with B, C fair: I(A;B) = 0 but I(A;B|C) = 1
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s: Vec<(u8, u8, u8)> = (0..50_000)
            .map(|_| {
                let b: u8 = rng.random_range(0..2);
                let c: u8 = rng.random_range(0..2);
                (b ^ c, b, c)
            })
            .collect();
        assert!((empirical_cmi(&s).unwrap() - 1.0).abs() < 0.02);
        let pairs: Vec<(u8, u8)> = s.iter().map(|t| (t.0, t.1)).collect();
        assert!(empirical_mi(&pairs).unwrap() < 0.02);
    }

    #[test]
    fn too_few_samples() {
        let s = vec![(0u8, 0u8); 999];
        assert!(matches!(empirical_mi(&s), Err(Error::Precondition(_))));
    }
}
