//! Robust (strong) joint typicality.
//!
//! A tuple of length-`n` sequences is typical for a reference joint `p` when
//! every cell `a` of the product alphabet has empirical frequency within
//! `eps * p(a)` of `p(a)`, and cells with `p(a) = 0` never occur.

use crate::error::{Error, Result};
use crate::prob::{JointPmf, Shape};
use crate::scalar::Real;

/// Precomputed per-cell count bounds for one reference joint and block length.
#[derive(Debug, Clone)]
pub struct TypicalityChecker {
    n: usize,
    dims: Vec<usize>,
    strides: Vec<usize>,
    forbidden: Vec<bool>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    counts: Vec<u32>,
    touched: Vec<usize>,
}

impl TypicalityChecker {
    pub fn new<T: Real>(reference: &JointPmf<T>, epsilon: f64, n: usize) -> Self {
        let shape = Shape::of(reference.vars());
        let nf = n as f64;
        let slack = 1e-9;
        let probs: Vec<f64> = reference.probs().iter().map(|p| p.as_f64()).collect();
        Self {
            n,
            dims: shape.dims().to_vec(),
            strides: shape.strides().to_vec(),
            forbidden: probs.iter().map(|p| *p <= 0.0).collect(),
            lo: probs.iter().map(|p| nf * p * (1.0 - epsilon) - slack).collect(),
            hi: probs.iter().map(|p| nf * p * (1.0 + epsilon) + slack).collect(),
            counts: vec![0; probs.len()],
            touched: Vec::with_capacity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stride of variable `axis` in the flat cell index.
    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    /// Flat cell offsets of the fixed variables, one per position.
    pub fn offsets(&self, fixed: &[(usize, &[u8])]) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (axis, seq) in fixed {
            let s = self.strides[*axis];
            for (o, v) in out.iter_mut().zip(seq.iter()) {
                *o += *v as usize * s;
            }
        }
        out
    }

    /// Typicality of `lead` (on axis with stride `lead_stride`) joined with precomputed offsets.
    pub fn check_with_offsets(&mut self, lead: &[u8], lead_stride: usize, offsets: &[usize]) -> bool {
        self.reset();
        for (v, o) in lead.iter().zip(offsets) {
            let cell = *v as usize * lead_stride + o;
            if self.forbidden[cell] {
                return false;
            }
            if self.counts[cell] == 0 {
                self.touched.push(cell);
            }
            self.counts[cell] += 1;
        }
        self.bounds_hold()
    }

    /// Typicality of a full tuple of sequences, one per reference variable.
    pub fn check(&mut self, seqs: &[&[u8]]) -> bool {
        self.reset();
        for i in 0..self.n {
            let cell: usize = seqs.iter().zip(&self.strides).map(|(s, st)| s[i] as usize * st).sum();
            if self.forbidden[cell] {
                return false;
            }
            if self.counts[cell] == 0 {
                self.touched.push(cell);
            }
            self.counts[cell] += 1;
        }
        self.bounds_hold()
    }

    fn reset(&mut self) {
        for c in self.touched.drain(..) {
            self.counts[c] = 0;
        }
    }

    fn bounds_hold(&self) -> bool {
        // untouched cells have count 0, which is fine only if their lower bound is <= 0
        self.counts
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (lo, hi))| {
                let c = *c as f64;
                c >= *lo && c <= *hi
            })
    }

    pub(crate) fn validate(&self, seqs: &[&[u8]]) -> Result<()> {
        if seqs.len() != self.dims.len() {
            return Err(Error::Usage(format!(
                "typicality test needs {} sequences, got {}",
                self.dims.len(),
                seqs.len()
            )));
        }
        for (k, (s, d)) in seqs.iter().zip(&self.dims).enumerate() {
            if s.len() != self.n {
                return Err(Error::Usage(format!(
                    "sequence {k} has length {}, expected {}",
                    s.len(),
                    self.n
                )));
            }
            if let Some(v) = s.iter().find(|v| **v as usize >= *d) {
                return Err(Error::Usage(format!("sequence {k} holds symbol {v} outside an alphabet of size {d}")));
            }
        }
        Ok(())
    }
}

/// Whether `seqs` (one per variable of `reference`, in order) are jointly `epsilon`-typical.
pub fn typicality_test<T: Real>(seqs: &[&[u8]], reference: &JointPmf<T>, epsilon: f64) -> Result<bool> {
    let n = seqs.first().map_or(0, |s| s.len());
    let mut checker = TypicalityChecker::new(reference, epsilon, n);
    checker.validate(seqs)?;
    Ok(checker.check(seqs))
}
