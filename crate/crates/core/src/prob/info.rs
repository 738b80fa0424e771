//! Entropy and (conditional) mutual information, in bits.
//!
//! Zero-mass cells contribute nothing, so a table with unreachable rows never
//! produces NaN.

use super::joint::JointPmf;
use super::pmf::Pmf;
use crate::error::{config_err, Result};
use crate::scalar::Real;

pub(crate) fn entropy_of_weights<T: Real>(probs: &[T]) -> T {
    -probs.iter().map(|p| p.xlog2x()).sum::<T>()
}

pub fn entropy<T: Real>(p: &Pmf<T>) -> T {
    entropy_of_weights(p.probs())
}

fn disjoint(sets: &[&[&str]]) -> Result<()> {
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if let Some(v) = a.iter().find(|v| b.contains(v)) {
                return Err(config_err!("variable `{v}` appears in two argument sets"));
            }
        }
    }
    Ok(())
}

fn union<'a>(sets: &[&[&'a str]]) -> Vec<&'a str> {
    sets.iter().flat_map(|s| s.iter().copied()).collect()
}

/// `H(target | given) = H(target, given) - H(given)`.
pub fn conditional_entropy<T: Real>(
    joint: &JointPmf<T>,
    target: &[&str],
    given: &[&str],
) -> Result<T> {
    disjoint(&[target, given])?;
    if target.is_empty() {
        return Err(config_err!("conditional entropy needs a target variable"));
    }
    let h_tg = joint.entropy_of(&union(&[target, given]))?;
    let h_g = joint.entropy_of(given)?;
    Ok(h_tg - h_g)
}

/// `I(a; b) = H(a) + H(b) - H(a, b)`.
pub fn mutual_information<T: Real>(joint: &JointPmf<T>, a: &[&str], b: &[&str]) -> Result<T> {
    conditional_mutual_information(joint, a, b, &[])
}

/// `I(a; b | c) = H(a, c) + H(b, c) - H(a, b, c) - H(c)`.
pub fn conditional_mutual_information<T: Real>(
    joint: &JointPmf<T>,
    a: &[&str],
    b: &[&str],
    c: &[&str],
) -> Result<T> {
    disjoint(&[a, b, c])?;
    if a.is_empty() || b.is_empty() {
        return Err(config_err!("mutual information needs two nonempty variable sets"));
    }
    let h_ac = joint.entropy_of(&union(&[a, c]))?;
    let h_bc = joint.entropy_of(&union(&[b, c]))?;
    let h_abc = joint.entropy_of(&union(&[a, b, c]))?;
    let h_c = joint.entropy_of(c)?;
    Ok(h_ac + h_bc - h_abc - h_c)
}
