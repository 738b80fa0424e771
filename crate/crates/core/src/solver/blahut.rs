//! Alternating maximization for the capacity of a single discrete memoryless channel.

use serde::Serialize;

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlahutConfig {
    /// Stop once the upper and lower capacity bounds are this close (bits).
    pub tol: f64,
    /// Also stop if the estimate moves less than this between iterations.
    pub stall_tol: f64,
    pub max_iter: usize,
}

impl Default for BlahutConfig {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            stall_tol: 1e-9,
            max_iter: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlahutResult<T> {
    /// Mutual information of the returned input law.
    pub capacity: T,
    /// `max_s D(W(.|s) || q)` at the returned input law; the true capacity lies in `[capacity, upper]`.
    pub upper: T,
    pub input: Vec<T>,
    pub iterations: usize,
    /// Estimate after each iteration; nondecreasing.
    pub history: Vec<T>,
}

/// Capacity in bits of the channel with rows `law[s][x]`.
pub fn blahut_arimoto<T: Real>(law: &[&[T]], cfg: &BlahutConfig) -> BlahutResult<T> {
    let ns = law.len();
    let nx = law.first().map_or(0, |r| r.len());
    let mut r = vec![T::one() / T::from_usize(ns).unwrap(); ns];
    let mut q = vec![T::zero(); nx];
    let mut d = vec![T::zero(); ns];
    let mut history = Vec::new();
    let tol = T::lit(cfg.tol);
    let stall = T::lit(cfg.stall_tol);
    let mut prev = T::neg_infinity();
    let mut iterations = 0;
    let (mut value, mut upper);
    loop {
        output_law(law, &r, &mut q);
        divergences(law, &q, &mut d);
        value = r.iter().zip(&d).map(|(a, b)| *a * *b).sum::<T>();
        upper = d.iter().copied().fold(T::neg_infinity(), T::max);
        history.push(value);
        iterations += 1;
        if upper - value < tol || (value - prev).abs() < stall || iterations >= cfg.max_iter {
            break;
        }
        prev = value;
        // r(s) <- r(s) 2^{D(s)} / Z, shifted by the max for stability
        let mut z = T::zero();
        for (ri, di) in r.iter_mut().zip(&d) {
            *ri = *ri * (*di - upper).exp2();
            z = z + *ri;
        }
        r.iter_mut().for_each(|x| *x = *x / z);
    }
    BlahutResult {
        capacity: value.max(T::zero()),
        upper,
        input: r,
        iterations,
        history,
    }
}

fn output_law<T: Real>(law: &[&[T]], r: &[T], q: &mut [T]) {
    q.iter_mut().for_each(|x| *x = T::zero());
    for (row, &p) in law.iter().zip(r) {
        for (qx, &w) in q.iter_mut().zip(row.iter()) {
            *qx = *qx + p * w;
        }
    }
}

fn divergences<T: Real>(law: &[&[T]], q: &[T], d: &mut [T]) {
    for (row, ds) in law.iter().zip(d.iter_mut()) {
        *ds = row
            .iter()
            .zip(q)
            .filter(|(w, _)| **w > T::zero())
            .map(|(w, qx)| *w * (*w / *qx).log2())
            .sum();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h2(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
        }
    }

    fn run(rows: &[Vec<f64>]) -> BlahutResult<f64> {
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        blahut_arimoto(&refs, &BlahutConfig::default())
    }

    #[test]
    fn noiseless_and_useless() {
        let id: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| (i == j) as u8 as f64).collect()).collect();
        assert!((run(&id).capacity - 2.0).abs() < 1e-7);
        let useless = vec![vec![0.3, 0.7]; 3];
        assert!(run(&useless).capacity.abs() < 1e-9);
    }

    #[test]
    fn binary_symmetric() {
        for e in [0.0, 0.05, 0.11, 0.3, 0.5] {
            let c = run(&[vec![1.0 - e, e], vec![e, 1.0 - e]]).capacity;
            assert!((c - (1.0 - h2(e))).abs() < 1e-7, "e={e}");
        }
    }

    #[test]
    fn z_channel() {
        // Z channel with p = 0.5: C = log2(1 + (1-p) p^{p/(1-p)}) = log2(1.25)
        let c = run(&[vec![1.0, 0.0], vec![0.5, 0.5]]).capacity;
        assert!((c - 1.25f64.log2()).abs() < 1e-7);
    }

    proptest! {
        #[test]
        fn estimate_is_monotone_and_bracketed(w in prop::collection::vec(0.01f64..1.0, 6)) {
            let rows: Vec<Vec<f64>> = w.chunks(3).map(|c| {
                let s: f64 = c.iter().sum();
                c.iter().map(|x| x / s).collect()
            }).collect();
            let res = run(&rows);
            for pair in res.history.windows(2) {
                prop_assert!(pair[1] >= pair[0] - 1e-12);
            }
            prop_assert!(res.upper >= res.capacity - 1e-12);
        }
    }
}
