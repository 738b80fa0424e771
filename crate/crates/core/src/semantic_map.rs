//! Semantics, messages and contexts: the triple `(W, M, Q)` where context
//! removes the ambiguity of a message, `H(W | M, Q) = 0`.

use serde::Serialize;

use crate::channel::{SemanticChannel, Q1T};
use crate::error::{config_err, Error, Result};
use crate::prob::{conditional_entropy, Alphabet, JointPmf};
use crate::scalar::Real;

pub const W: &str = "w";
pub const M: &str = "m";
pub const Q: &str = "q";

/// Joint law of semantic, message and context.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemanticMap<T> {
    joint: JointPmf<T>,
}

/// Outcome of [`SemanticMap::verify_context_disambiguation`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disambiguation {
    pub ok: bool,
    /// `H(W | M, Q)` in bits.
    pub residual_bits: f64,
    /// Every `(message, context)` pair with positive mass on two or more semantics.
    pub violations: Vec<(String, String)>,
}

/// Messages grouped by the semantic they carry under one context.
pub type Partition = Vec<(String, Vec<String>)>;

impl<T: Real> SemanticMap<T> {
    /// `probs` is row-major over `(w, m, q)`.
    pub fn new(semantics: Alphabet, messages: Alphabet, contexts: Alphabet, probs: Vec<T>) -> Result<Self> {
        let joint = JointPmf::new(
            vec![semantics.renamed(W), messages.renamed(M), contexts.renamed(Q)],
            probs,
        )?;
        Ok(Self { joint })
    }

    pub fn joint(&self) -> &JointPmf<T> {
        &self.joint
    }

    pub fn semantics(&self) -> &Alphabet {
        &self.joint.vars()[0]
    }

    pub fn messages(&self) -> &Alphabet {
        &self.joint.vars()[1]
    }

    pub fn contexts(&self) -> &Alphabet {
        &self.joint.vars()[2]
    }

    /// `H(W | M)`: how much a message leaves its meaning open when context is ignored.
    pub fn ambiguity(&self) -> T {
        conditional_entropy(&self.joint, &[W], &[M]).expect("fixed variable names")
    }

    /// `H(W | M, Q)`.
    pub fn residual_ambiguity(&self) -> T {
        conditional_entropy(&self.joint, &[W], &[M, Q]).expect("fixed variable names")
    }

    pub fn verify_context_disambiguation(&self) -> Disambiguation {
        let residual = self.residual_ambiguity();
        let (nw, nm, nq) = (self.semantics().size(), self.messages().size(), self.contexts().size());
        let mut violations = Vec::new();
        for m in 0..nm {
            for q in 0..nq {
                let carriers = (0..nw)
                    .filter(|&w| self.joint.prob(&[w, m, q]) > T::zero())
                    .count();
                if carriers > 1 {
                    violations.push((
                        self.messages().symbol(m).to_string(),
                        self.contexts().symbol(q).to_string(),
                    ));
                }
            }
        }
        Disambiguation {
            ok: residual < T::mass_tol(),
            residual_bits: residual.as_f64(),
            violations,
        }
    }

    /// How context `q` splits the realizable messages among semantics.
    ///
    /// Semantics with no realizable message under `q` are left out; messages
    /// keep alphabet order within each subset.
    pub fn partition_of(&self, q: &str) -> Result<Partition> {
        let qi = self
            .contexts()
            .index_of(q)
            .ok_or_else(|| config_err!("unknown context `{q}`"))?;
        let check = self.verify_context_disambiguation();
        if !check.ok || !check.violations.is_empty() {
            return Err(Error::Precondition(format!(
                "map is ambiguous at {:?}; no partition exists",
                check.violations
            )));
        }
        let (nw, nm) = (self.semantics().size(), self.messages().size());
        let mut groups: Vec<Vec<String>> = vec![Vec::new(); nw];
        for m in 0..nm {
            if let Some(w) = (0..nw).find(|&w| self.joint.prob(&[w, m, qi]) > T::zero()) {
                groups[w].push(self.messages().symbol(m).to_string());
            }
        }
        Ok(groups
            .into_iter()
            .enumerate()
            .filter(|(_, g)| !g.is_empty())
            .map(|(w, g)| (self.semantics().symbol(w).to_string(), g))
            .collect())
    }

    /// The semantic a message carries under a context, if the pair is realizable.
    pub fn interpret(&self, m: &str, q: &str) -> Option<&str> {
        let mi = self.messages().index_of(m)?;
        let qi = self.contexts().index_of(q)?;
        (0..self.semantics().size())
            .find(|&w| self.joint.prob(&[w, mi, qi]) > T::zero())
            .map(|w| self.semantics().symbol(w))
    }

    /// One way to read the map as a channel: `s := w`, `x := m`, shared context `q0 := q`,
    /// law `p(m | w, q)`.
    ///
    /// Pairs `(w, q)` that never occur get a uniform message row.
    pub fn induced_channel(&self) -> Result<SemanticChannel<T>> {
        let cond = self.joint.condition(M, &[Q, W])?;
        let nm = self.messages().size();
        let uniform = T::one() / T::from_usize(nm).unwrap();
        SemanticChannel::from_fn(
            self.contexts().clone(),
            Alphabet::degenerate(Q1T),
            self.semantics().clone(),
            self.messages().clone(),
            |q, _, w| {
                let r = cond.row_index(&[q, w]);
                if cond.is_reachable(r) {
                    cond.row(r).to_vec()
                } else {
                    vec![uniform; nm]
                }
            },
        )
    }

    /// Context law `p(q)`.
    pub fn context_probs(&self) -> Vec<T> {
        self.joint.marginalize(&[Q]).unwrap().probs().to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(name: &str, s: &[&str]) -> Alphabet {
        Alphabet::new(name, s.iter().copied()).unwrap()
    }

    /// "date" means a calendar day under `cal` and a fruit under `food`.
    fn date_map() -> SemanticMap<f64> {
        let w = alpha("w", &["day", "fruit"]);
        let m = alpha("m", &["date", "day-of-month", "palm-fruit"]);
        let q = alpha("q", &["cal", "food"]);
        let mut p = vec![0.0; 12];
        let at = |w: usize, m: usize, q: usize| (w * 3 + m) * 2 + q;
        p[at(0, 0, 0)] = 0.5 * 0.9;
        p[at(0, 1, 0)] = 0.5 * 0.05;
        p[at(1, 2, 0)] = 0.5 * 0.05;
        p[at(1, 0, 1)] = 0.5 * 0.9;
        p[at(1, 2, 1)] = 0.5 * 0.05;
        p[at(0, 1, 1)] = 0.5 * 0.05;
        SemanticMap::new(w, m, q, p).unwrap()
    }

    #[test]
    fn bijection_has_no_ambiguity() {
        let w = Alphabet::indexed("w", 3).unwrap();
        let m = Alphabet::indexed("m", 3).unwrap();
        let q = Alphabet::degenerate("q");
        let map = SemanticMap::<f64>::new(w, m, q, {
            let mut p = vec![0.0; 9];
            p[0] = 0.2;
            p[4] = 0.3;
            p[8] = 0.5;
            p
        })
        .unwrap();
        assert!(map.ambiguity().abs() < 1e-12);
        let check = map.verify_context_disambiguation();
        assert!(check.ok && check.violations.is_empty());
        for (_, msgs) in map.partition_of("-").unwrap() {
            assert_eq!(msgs.len(), 1);
        }
    }

    #[test]
    fn date_message_carries_one_bit_without_context() {
        let map = date_map();
        // only "date" is ambiguous: W uniform given it, P(date) = 0.9
        assert!((map.ambiguity() - 0.9).abs() < 1e-12);
        assert!(map.verify_context_disambiguation().ok);
    }

    #[test]
    fn context_repartitions_messages() {
        let map = date_map();
        let cal = map.partition_of("cal").unwrap();
        assert_eq!(
            cal,
            vec![
                ("day".to_string(), vec!["date".to_string(), "day-of-month".to_string()]),
                ("fruit".to_string(), vec!["palm-fruit".to_string()]),
            ]
        );
        assert_eq!(map.interpret("date", "cal"), Some("day"));
        assert_eq!(map.interpret("date", "food"), Some("fruit"));
    }

    #[test]
    fn split_mass_is_reported() {
        let w = alpha("w", &["w1", "w2"]);
        let m = alpha("m", &["m1"]);
        let q = alpha("q", &["q1", "q2"]);
        // (m1,q1) split 0.5/0.5; (m1,q2) always w1
        let map = SemanticMap::<f64>::new(w, m, q, vec![0.25, 0.5, 0.25, 0.0]).unwrap();
        let check = map.verify_context_disambiguation();
        assert!(!check.ok);
        assert_eq!(check.violations, vec![("m1".to_string(), "q1".to_string())]);
        assert!(matches!(map.partition_of("q1"), Err(Error::Precondition(_))));
    }

    #[test]
    fn induced_channel_rows_follow_the_map() {
        let ch = date_map().induced_channel().unwrap();
        let row = ch.row(0, 0, 0);
        assert!((row[0] - 0.9 / 0.95).abs() < 1e-12);
        assert_eq!(ch.row(0, 0, 1), &[0.0, 0.0, 1.0]);
    }
}
