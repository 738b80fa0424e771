use serde::Serialize;

use super::alphabet::{Alphabet, Shape};
use crate::error::{config_err, Result};
use crate::scalar::Real;

/// Validate a weight vector as a distribution, renormalizing small drift.
///
/// Entries must be finite and nonnegative. A total within `T::mass_tol()` of
/// one is accepted as is, within `T::renorm_tol()` it is rescaled, anything
/// further off is rejected.
pub(crate) fn checked_mass<T: Real>(what: &str, probs: &mut [T]) -> Result<()> {
    for (i, p) in probs.iter().enumerate() {
        if !p.is_finite() || *p < T::zero() {
            return Err(config_err!("{what}: entry {i} is {p}, expected a finite nonnegative weight"));
        }
    }
    let total: T = probs.iter().copied().sum();
    let dev = (total - T::one()).abs();
    if dev > T::renorm_tol() {
        return Err(config_err!("{what}: weights sum to {total}, expected 1"));
    }
    if dev > T::mass_tol() {
        for p in probs.iter_mut() {
            *p = *p / total;
        }
    }
    Ok(())
}

/// Probability mass function over one alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf<T> {
    alphabet: Alphabet,
    probs: Vec<T>,
}

impl<T: Real> Pmf<T> {
    pub fn new(alphabet: Alphabet, mut probs: Vec<T>) -> Result<Self> {
        if probs.len() != alphabet.size() {
            return Err(config_err!(
                "pmf over `{}` needs {} weights, got {}",
                alphabet.name(),
                alphabet.size(),
                probs.len()
            ));
        }
        checked_mass(&format!("pmf over `{}`", alphabet.name()), &mut probs)?;
        Ok(Self { alphabet, probs })
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let k = T::from_usize(alphabet.size()).unwrap();
        let probs = vec![T::one() / k; alphabet.size()];
        Self { alphabet, probs }
    }

    pub fn point(alphabet: Alphabet, index: usize) -> Self {
        let mut probs = vec![T::zero(); alphabet.size()];
        probs[index] = T::one();
        Self { alphabet, probs }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> T {
        self.probs[index]
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> T {
        super::info::entropy_of_weights(&self.probs)
    }
}

/// Conditional law `p(target | given...)`, one row per conditioning tuple.
///
/// Rows produced by conditioning a joint on a zero-mass tuple are kept as all
/// zeros and flagged unreachable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondPmf<T> {
    given: Vec<Alphabet>,
    target: Alphabet,
    probs: Vec<T>,
    reachable: Vec<bool>,
}

impl<T: Real> CondPmf<T> {
    /// `probs` is row-major: conditioning tuple (last given axis fastest), then target.
    pub fn new(given: Vec<Alphabet>, target: Alphabet, mut probs: Vec<T>) -> Result<Self> {
        let rows = Shape::of(&given).len();
        let k = target.size();
        if probs.len() != rows * k {
            return Err(config_err!(
                "conditional pmf of `{}` needs {}x{} weights, got {}",
                target.name(),
                rows,
                k,
                probs.len()
            ));
        }
        let mut tmp = vec![0; given.len()];
        let shape = Shape::of(&given);
        for r in 0..rows {
            shape.unflat(r, &mut tmp);
            let label = row_label(&given, &tmp);
            checked_mass(
                &format!("row p({} | {label})", target.name()),
                &mut probs[r * k..(r + 1) * k],
            )?;
        }
        Ok(Self {
            given,
            target,
            probs,
            reachable: vec![true; rows],
        })
    }

    /// Build from a closure returning the row for each conditioning tuple.
    pub fn from_rows<F>(given: Vec<Alphabet>, target: Alphabet, mut row: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Vec<T>,
    {
        let shape = Shape::of(&given);
        let mut tmp = vec![0; given.len()];
        let mut probs = Vec::with_capacity(shape.len() * target.size());
        for r in 0..shape.len() {
            shape.unflat(r, &mut tmp);
            probs.extend(row(&tmp));
        }
        Self::new(given, target, probs)
    }

    pub(crate) fn from_parts(
        given: Vec<Alphabet>,
        target: Alphabet,
        probs: Vec<T>,
        reachable: Vec<bool>,
    ) -> Self {
        Self {
            given,
            target,
            probs,
            reachable,
        }
    }

    pub fn given(&self) -> &[Alphabet] {
        &self.given
    }

    pub fn target(&self) -> &Alphabet {
        &self.target
    }

    pub fn num_rows(&self) -> usize {
        self.reachable.len()
    }

    pub fn row_index(&self, given: &[usize]) -> usize {
        Shape::of(&self.given).flat(given)
    }

    pub fn row(&self, row: usize) -> &[T] {
        let k = self.target.size();
        &self.probs[row * k..(row + 1) * k]
    }

    pub fn row_for(&self, given: &[usize]) -> &[T] {
        self.row(self.row_index(given))
    }

    pub fn prob(&self, given: &[usize], target: usize) -> T {
        self.row_for(given)[target]
    }

    pub fn is_reachable(&self, row: usize) -> bool {
        self.reachable[row]
    }

    pub fn unreachable_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.reachable
            .iter()
            .enumerate()
            .filter(|(_, r)| !**r)
            .map(|(i, _)| i)
    }

    /// The flat row-major weight table.
    pub fn table(&self) -> &[T] {
        &self.probs
    }
}

pub(crate) fn row_label(given: &[Alphabet], idx: &[usize]) -> String {
    if given.is_empty() {
        return "()".to_string();
    }
    given
        .iter()
        .zip(idx)
        .map(|(a, i)| format!("{}={}", a.name(), a.symbol(*i)))
        .collect::<Vec<_>>()
        .join(",")
}
