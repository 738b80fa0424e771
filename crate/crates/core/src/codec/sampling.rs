use rand::Rng;

use crate::scalar::Real;

/// Inverse-CDF sampler over a finite weight vector.
#[derive(Debug, Clone)]
pub struct Sampler {
    cdf: Vec<f64>,
}

impl Sampler {
    pub fn new<T: Real>(weights: &[T]) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w.as_f64();
                acc
            })
            .collect();
        cdf.iter_mut().for_each(|c| *c /= acc);
        // the last symbol with weight absorbs rounding at the top; later zero-weight ones are unreachable
        if let Some(last) = weights.iter().rposition(|w| *w > T::zero()) {
            cdf[last..].iter_mut().for_each(|c| *c = f64::INFINITY);
        }
        Self { cdf }
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|c| *c <= u)
    }
}
