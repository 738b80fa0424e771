use serde::Serialize;

use super::alphabet::{Alphabet, Shape};
use super::pmf::{checked_mass, CondPmf, Pmf};
use crate::error::{config_err, Result};
use crate::scalar::Real;

/// Dense joint distribution over an ordered list of named variables.
///
/// Cells are stored row-major with the last variable varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointPmf<T> {
    vars: Vec<Alphabet>,
    probs: Vec<T>,
    #[serde(skip)]
    shape: Shape,
}

impl<T: Real> JointPmf<T> {
    pub fn new(vars: Vec<Alphabet>, mut probs: Vec<T>) -> Result<Self> {
        check_names(&vars)?;
        let shape = Shape::of(&vars);
        if probs.len() != shape.len() {
            return Err(config_err!(
                "joint over ({}) needs {} cells, got {}",
                names(&vars).join(","),
                shape.len(),
                probs.len()
            ));
        }
        checked_mass(&format!("joint over ({})", names(&vars).join(",")), &mut probs)?;
        Ok(Self { vars, probs, shape })
    }

    /// Fill every cell from a closure over symbol indices, then validate.
    pub fn from_fn<F>(vars: Vec<Alphabet>, mut cell: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> T,
    {
        let shape = Shape::of(&vars);
        let mut idx = vec![0; vars.len()];
        let probs = (0..shape.len())
            .map(|flat| {
                shape.unflat(flat, &mut idx);
                cell(&idx)
            })
            .collect();
        Self::new(vars, probs)
    }

    /// Single-variable joint from a pmf.
    pub fn from_pmf(pmf: &Pmf<T>) -> Self {
        let vars = vec![pmf.alphabet().clone()];
        let shape = Shape::of(&vars);
        Self {
            vars,
            probs: pmf.probs().to_vec(),
            shape,
        }
    }

    pub fn vars(&self) -> &[Alphabet] {
        &self.vars
    }

    pub fn var_names(&self) -> Vec<&str> {
        names(&self.vars)
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn num_cells(&self) -> usize {
        self.probs.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|a| a.name() == name)
            .ok_or_else(|| {
                config_err!(
                    "unknown variable `{name}`; joint has ({})",
                    self.var_names().join(",")
                )
            })
    }

    pub fn alphabet(&self, name: &str) -> Result<&Alphabet> {
        Ok(&self.vars[self.var_index(name)?])
    }

    pub fn prob(&self, idx: &[usize]) -> T {
        self.probs[self.shape.flat(idx)]
    }

    pub fn total_mass(&self) -> T {
        self.probs.iter().copied().sum()
    }

    /// Visit every cell with its symbol indices.
    pub fn for_each_cell<F: FnMut(&[usize], T)>(&self, mut visit: F) {
        let mut idx = vec![0; self.vars.len()];
        for (flat, p) in self.probs.iter().enumerate() {
            self.shape.unflat(flat, &mut idx);
            visit(&idx, *p);
        }
    }

    fn indices_of(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let i = self.var_index(n)?;
            if out.contains(&i) {
                return Err(config_err!("variable `{n}` listed twice"));
            }
            out.push(i);
        }
        Ok(out)
    }

    /// Sum out every variable not in `keep`; the result lists variables in `keep` order.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf<T>> {
        if keep.is_empty() {
            return Err(config_err!("marginalize needs at least one variable to keep"));
        }
        let axes = self.indices_of(keep)?;
        Ok(self.marginal_on_axes(&axes))
    }

    pub(crate) fn marginal_on_axes(&self, axes: &[usize]) -> JointPmf<T> {
        let vars: Vec<Alphabet> = axes.iter().map(|&i| self.vars[i].clone()).collect();
        let shape = Shape::of(&vars);
        let mut probs = vec![T::zero(); shape.len()];
        let out_strides: Vec<usize> = shape.strides().to_vec();
        let mut idx = vec![0; self.vars.len()];
        for (flat, p) in self.probs.iter().enumerate() {
            if *p == T::zero() {
                continue;
            }
            self.shape.unflat(flat, &mut idx);
            let o: usize = axes.iter().zip(&out_strides).map(|(a, s)| idx[*a] * s).sum();
            probs[o] = probs[o] + *p;
        }
        JointPmf { vars, probs, shape }
    }

    /// The distribution of one variable as a [`Pmf`].
    pub fn pmf_of(&self, name: &str) -> Result<Pmf<T>> {
        let m = self.marginalize(&[name])?;
        let alphabet = m.vars[0].clone();
        Ok(Pmf::new(alphabet, m.probs).expect("marginal of a valid joint"))
    }

    /// `p(target | given)`; rows whose conditioning tuple has zero mass are flagged unreachable.
    pub fn condition(&self, target: &str, given: &[&str]) -> Result<CondPmf<T>> {
        if given.contains(&target) {
            return Err(config_err!("`{target}` is both target and conditioning variable"));
        }
        let mut keep: Vec<&str> = given.to_vec();
        keep.push(target);
        let axes = self.indices_of(&keep)?;
        let m = self.marginal_on_axes(&axes);
        let k = self.vars[axes[axes.len() - 1]].size();
        let rows = m.probs.len() / k;
        let mut probs = m.probs;
        let mut reachable = vec![true; rows];
        for r in 0..rows {
            let row = &mut probs[r * k..(r + 1) * k];
            let mass: T = row.iter().copied().sum();
            if mass > T::zero() {
                row.iter_mut().for_each(|p| *p = *p / mass);
            } else {
                reachable[r] = false;
            }
        }
        let given_alpha = axes[..axes.len() - 1]
            .iter()
            .map(|&i| self.vars[i].clone())
            .collect();
        Ok(CondPmf::from_parts(
            given_alpha,
            self.vars[axes[axes.len() - 1]].clone(),
            probs,
            reachable,
        ))
    }

    /// Entropy in bits of the marginal on `names`; the empty set has entropy zero.
    pub fn entropy_of(&self, names: &[&str]) -> Result<T> {
        if names.is_empty() {
            return Ok(T::zero());
        }
        let axes = self.indices_of(names)?;
        Ok(super::info::entropy_of_weights(
            &self.marginal_on_axes(&axes).probs,
        ))
    }

    /// Replace the variable names (same order, same symbols).
    pub fn renamed(&self, new_names: &[&str]) -> Result<JointPmf<T>> {
        if new_names.len() != self.vars.len() {
            return Err(config_err!("renamed needs {} names", self.vars.len()));
        }
        let vars: Vec<Alphabet> = self
            .vars
            .iter()
            .zip(new_names)
            .map(|(a, n)| a.renamed(*n))
            .collect();
        check_names(&vars)?;
        Ok(JointPmf {
            vars,
            probs: self.probs.clone(),
            shape: self.shape.clone(),
        })
    }
}

fn names(vars: &[Alphabet]) -> Vec<&str> {
    vars.iter().map(Alphabet::name).collect()
}

fn check_names(vars: &[Alphabet]) -> Result<()> {
    if vars.is_empty() {
        return Err(config_err!("joint needs at least one variable"));
    }
    for (i, a) in vars.iter().enumerate() {
        if vars[..i].iter().any(|b| b.name() == a.name()) {
            return Err(config_err!("variable `{}` appears twice", a.name()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(name: &str) -> Alphabet {
        Alphabet::indexed(name, 2).unwrap()
    }

    #[test]
    fn marginal_of_uniform_is_uniform() {
        let j = JointPmf::<f64>::new(vec![bits("a"), bits("b")], vec![0.25; 4]).unwrap();
        let m = j.marginalize(&["a"]).unwrap();
        assert_eq!(m.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn marginal_of_point_mass() {
        let t = Alphabet::indexed("b", 3).unwrap();
        let j = JointPmf::<f64>::from_fn(vec![bits("a"), t], |i| {
            if i == [1, 2] {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(j.marginalize(&["b"]).unwrap().probs(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn keeping_all_variables_is_identity() {
        let p = vec![0.1, 0.2, 0.05, 0.3, 0.15, 0.2];
        let j = JointPmf::<f64>::new(vec![bits("a"), Alphabet::indexed("b", 3).unwrap()], p)
            .unwrap();
        assert_eq!(j.marginalize(&["a", "b"]).unwrap(), j);
    }

    #[test]
    fn marginal_reorders_axes() {
        let p = vec![0.1, 0.2, 0.3, 0.4];
        let j = JointPmf::<f64>::new(vec![bits("a"), bits("b")], p).unwrap();
        let t = j.marginalize(&["b", "a"]).unwrap();
        assert_eq!(t.probs(), &[0.1, 0.3, 0.2, 0.4]);
    }

    #[test]
    fn unknown_variable_is_config_error() {
        let j = JointPmf::<f64>::new(vec![bits("a")], vec![0.5, 0.5]).unwrap();
        assert!(matches!(j.marginalize(&["z"]), Err(crate::Error::Config(_))));
        assert!(matches!(j.marginalize(&[]), Err(crate::Error::Config(_))));
    }

    #[test]
    fn condition_independent_rows_equal_marginal() {
        let pa = [0.3, 0.7];
        let pb = [0.2, 0.8];
        let j = JointPmf::<f64>::from_fn(vec![bits("a"), bits("b")], |i| pa[i[0]] * pb[i[1]])
            .unwrap();
        let c = j.condition("b", &["a"]).unwrap();
        for r in 0..2 {
            assert!((c.row(r)[0] - 0.2).abs() < 1e-12);
            assert!((c.row(r)[1] - 0.8).abs() < 1e-12);
        }
    }

    #[test]
    fn condition_deterministic_gives_identity_rows() {
        let j = JointPmf::<f64>::new(vec![bits("a"), bits("b")], vec![0.4, 0.0, 0.0, 0.6])
            .unwrap();
        let c = j.condition("b", &["a"]).unwrap();
        assert_eq!(c.row(0), &[1.0, 0.0]);
        assert_eq!(c.row(1), &[0.0, 1.0]);
    }

    #[test]
    fn condition_matches_hand_division() {
        // p(a,b) = [[0.1,0.3],[0.2,0.4]]; p(b|a=0) = (0.25,0.75), p(b|a=1) = (1/3,2/3)
        let j = JointPmf::<f64>::new(vec![bits("a"), bits("b")], vec![0.1, 0.3, 0.2, 0.4])
            .unwrap();
        let c = j.condition("b", &["a"]).unwrap();
        assert!((c.row(0)[0] - 0.25).abs() < 1e-12);
        assert!((c.row(0)[1] - 0.75).abs() < 1e-12);
        assert!((c.row(1)[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((c.row(1)[1] - 2.0 / 3.0).abs() < 1e-12);
        // and in the other direction
        let c = j.condition("a", &["b"]).unwrap();
        assert!((c.prob(&[1], 0) - 0.3 / 0.7).abs() < 1e-12);
    }

    #[test]
    fn zero_mass_rows_are_flagged() {
        let j = JointPmf::<f64>::new(vec![bits("a"), bits("b")], vec![0.5, 0.5, 0.0, 0.0])
            .unwrap();
        let c = j.condition("b", &["a"]).unwrap();
        assert!(c.is_reachable(0));
        assert!(!c.is_reachable(1));
        assert_eq!(c.unreachable_rows().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn overlapping_target_and_given_rejected() {
        let j = JointPmf::<f64>::new(vec![bits("a"), bits("b")], vec![0.25; 4]).unwrap();
        assert!(matches!(j.condition("a", &["a"]), Err(crate::Error::Config(_))));
    }

    #[test]
    fn small_drift_renormalized_large_rejected() {
        let j = JointPmf::<f64>::new(vec![bits("a")], vec![0.5, 0.5 + 5e-7]).unwrap();
        assert!((j.total_mass() - 1.0).abs() < 1e-12);
        assert!(JointPmf::<f64>::new(vec![bits("a")], vec![0.5, 0.4]).is_err());
        assert!(JointPmf::<f64>::new(vec![bits("a")], vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let j = JointPmf::<f32>::new(vec![bits("a"), bits("b")], vec![0.25; 4]).unwrap();
        let h = j.entropy_of(&["a", "b"]).unwrap();
        assert!((h - 2.0).abs() < 1e-6);
    }
}
