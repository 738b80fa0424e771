//! The context-dependent channel: context source, sender/receiver scenarios,
//! channel law `p(x | s, q0, q1t)` and the auxiliary binning scheme.
//!
//! Variable names used in every joint built here: `q0` (shared context),
//! `q1t` (sender-private context), `q2t` (receiver-private context), `u`
//! (auxiliary), `s` (semantic codeword symbol), `x` (message codeword symbol).
//! The sender sees `q1 = (q0, q1t)` and the receiver `q2 = (q0, q2t)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};
use crate::prob::{Alphabet, CondPmf, JointPmf, Shape};
use crate::scalar::Real;

pub const Q0: &str = "q0";
pub const Q1T: &str = "q1t";
pub const Q2T: &str = "q2t";
pub const U: &str = "u";
pub const S: &str = "s";
pub const X: &str = "x";

/// Who observes which part of the context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    /// Both ends see the same context (`q1t`, `q2t` degenerate).
    FullShared,
    /// The receiver's context is a subset of the sender's (`q2t` degenerate).
    SenderKnowsMore,
    /// The sender's context is a subset of the receiver's (`q1t` degenerate).
    ReceiverKnowsMore,
    /// Shared `q0` plus private parts on both ends.
    PartialShared,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::FullShared,
        Scenario::SenderKnowsMore,
        Scenario::ReceiverKnowsMore,
        Scenario::PartialShared,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::FullShared => "FullShared",
            Scenario::SenderKnowsMore => "SenderKnowsMore",
            Scenario::ReceiverKnowsMore => "ReceiverKnowsMore",
            Scenario::PartialShared => "PartialShared",
        }
    }

    /// Whether the rate for this scenario is a capacity or only an achievable rate.
    pub fn rate_kind(self) -> RateKind {
        match self {
            Scenario::FullShared | Scenario::SenderKnowsMore => RateKind::Capacity,
            Scenario::ReceiverKnowsMore | Scenario::PartialShared => RateKind::Achievable,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| config_err!("unknown scenario `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateKind {
    Capacity,
    Achievable,
}

/// Result of checking a context model against a scenario's cardinality rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioCheck {
    pub ok: bool,
    pub diagnostics: Vec<String>,
}

/// Joint law of the context components `(q0, q1t, q2t)`, i.i.d. across channel uses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextModel<T> {
    joint: JointPmf<T>,
    iid: bool,
}

impl<T: Real> ContextModel<T> {
    /// `probs` is row-major over `(q0, q1t, q2t)`.
    pub fn new(q0: Alphabet, q1t: Alphabet, q2t: Alphabet, probs: Vec<T>) -> Result<Self> {
        let joint = JointPmf::new(
            vec![q0.renamed(Q0), q1t.renamed(Q1T), q2t.renamed(Q2T)],
            probs,
        )?;
        Ok(Self { joint, iid: true })
    }

    pub fn from_fn<F>(q0: Alphabet, q1t: Alphabet, q2t: Alphabet, cell: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> T,
    {
        let joint = JointPmf::from_fn(
            vec![q0.renamed(Q0), q1t.renamed(Q1T), q2t.renamed(Q2T)],
            cell,
        )?;
        Ok(Self { joint, iid: true })
    }

    /// Shared context only, with the given law; both private parts degenerate.
    pub fn shared(q0: Alphabet, probs: Vec<T>) -> Result<Self> {
        Self::new(q0, Alphabet::degenerate(Q1T), Alphabet::degenerate(Q2T), probs)
    }

    /// No context at all.
    pub fn trivial() -> Self {
        Self::shared(Alphabet::degenerate(Q0), vec![T::one()]).expect("point mass")
    }

    pub fn joint(&self) -> &JointPmf<T> {
        &self.joint
    }

    pub fn q0(&self) -> &Alphabet {
        &self.joint.vars()[0]
    }

    pub fn q1_extra(&self) -> &Alphabet {
        &self.joint.vars()[1]
    }

    pub fn q2_extra(&self) -> &Alphabet {
        &self.joint.vars()[2]
    }

    /// Context symbols are drawn independently per channel use.
    pub fn is_iid(&self) -> bool {
        self.iid
    }

    pub fn prob(&self, q0: usize, q1t: usize, q2t: usize) -> T {
        self.joint.prob(&[q0, q1t, q2t])
    }

    /// Number of sender context values `q1 = (q0, q1t)`.
    pub fn num_sender_contexts(&self) -> usize {
        self.q0().size() * self.q1_extra().size()
    }

    /// Number of receiver context values `q2 = (q0, q2t)`.
    pub fn num_receiver_contexts(&self) -> usize {
        self.q0().size() * self.q2_extra().size()
    }

    /// Flat index of `(q0, q1t)`.
    pub fn sender_index(&self, q0: usize, q1t: usize) -> usize {
        q0 * self.q1_extra().size() + q1t
    }

    /// Flat index of `(q0, q2t)`.
    pub fn receiver_index(&self, q0: usize, q2t: usize) -> usize {
        q0 * self.q2_extra().size() + q2t
    }

    /// `p(q0, q1t)` indexed by [`Self::sender_index`].
    pub fn sender_marginal(&self) -> Vec<T> {
        self.joint.marginalize(&[Q0, Q1T]).unwrap().probs().to_vec()
    }

    /// Same model with the sender-private part summed out and replaced by a size-one alphabet.
    pub fn collapse_q1_extra(&self) -> Self {
        let m = self.joint.marginalize(&[Q0, Q2T]).unwrap();
        let (a, b) = (self.q0().size(), self.q2_extra().size());
        let probs = m.probs()[..a * b].to_vec();
        Self::new(
            self.q0().clone(),
            Alphabet::degenerate(Q1T),
            self.q2_extra().clone(),
            probs,
        )
        .expect("marginal of a valid model")
    }

    /// Same model with the receiver-private part summed out.
    pub fn collapse_q2_extra(&self) -> Self {
        let m = self.joint.marginalize(&[Q0, Q1T]).unwrap();
        Self::new(
            self.q0().clone(),
            self.q1_extra().clone(),
            Alphabet::degenerate(Q2T),
            m.probs().to_vec(),
        )
        .expect("marginal of a valid model")
    }
}

/// Check the cardinality constraints a scenario places on the context model.
pub fn validate_scenario<T: Real>(ctx: &ContextModel<T>, scenario: Scenario) -> ScenarioCheck {
    let mut diagnostics = Vec::new();
    let q1_free = ctx.q1_extra().is_degenerate();
    let q2_free = ctx.q2_extra().is_degenerate();
    let need_q1 = matches!(scenario, Scenario::FullShared | Scenario::ReceiverKnowsMore);
    let need_q2 = matches!(scenario, Scenario::FullShared | Scenario::SenderKnowsMore);
    if need_q1 && !q1_free {
        diagnostics.push(format!(
            "{scenario}: Q1t must be degenerate (size 1), found size {}",
            ctx.q1_extra().size()
        ));
    }
    if need_q2 && !q2_free {
        diagnostics.push(format!(
            "{scenario}: Q2t must be degenerate (size 1), found size {}",
            ctx.q2_extra().size()
        ));
    }
    ScenarioCheck {
        ok: diagnostics.is_empty(),
        diagnostics,
    }
}

pub(crate) fn require_scenario<T: Real>(ctx: &ContextModel<T>, scenario: Scenario) -> Result<()> {
    let check = validate_scenario(ctx, scenario);
    if check.ok {
        Ok(())
    } else {
        Err(Error::Scenario(check.diagnostics.join("; ")))
    }
}

/// Context-dependent channel law `p(x | s, q0, q1t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemanticChannel<T> {
    law: CondPmf<T>,
}

impl<T: Real> SemanticChannel<T> {
    /// `probs` is row-major over `(q0, q1t, s)` rows, each a distribution over `x`.
    pub fn new(q0: Alphabet, q1t: Alphabet, s: Alphabet, x: Alphabet, probs: Vec<T>) -> Result<Self> {
        let law = CondPmf::new(
            vec![q0.renamed(Q0), q1t.renamed(Q1T), s.renamed(S)],
            x.renamed(X),
            probs,
        )?;
        Ok(Self { law })
    }

    /// `row(q0, q1t, s)` returns `p(. | s, q0, q1t)`.
    pub fn from_fn<F>(q0: Alphabet, q1t: Alphabet, s: Alphabet, x: Alphabet, mut row: F) -> Result<Self>
    where
        F: FnMut(usize, usize, usize) -> Vec<T>,
    {
        let law = CondPmf::from_rows(
            vec![q0.renamed(Q0), q1t.renamed(Q1T), s.renamed(S)],
            x.renamed(X),
            |i| row(i[0], i[1], i[2]),
        )?;
        Ok(Self { law })
    }

    /// The same law for every context value.
    pub fn context_free(ctx: &ContextModel<T>, s: Alphabet, x: Alphabet, law: &[Vec<T>]) -> Result<Self> {
        Self::from_fn(ctx.q0().clone(), ctx.q1_extra().clone(), s, x, |_, _, si| {
            law[si].clone()
        })
    }

    pub fn law(&self) -> &CondPmf<T> {
        &self.law
    }

    pub fn q0(&self) -> &Alphabet {
        &self.law.given()[0]
    }

    pub fn q1_extra(&self) -> &Alphabet {
        &self.law.given()[1]
    }

    pub fn s(&self) -> &Alphabet {
        &self.law.given()[2]
    }

    pub fn x(&self) -> &Alphabet {
        self.law.target()
    }

    /// `p(. | s, q0, q1t)`.
    pub fn row(&self, q0: usize, q1t: usize, s: usize) -> &[T] {
        let r = (q0 * self.q1_extra().size() + q1t) * self.s().size() + s;
        self.law.row(r)
    }

    /// Check that the channel is indexed by the same context alphabets as `ctx`.
    pub fn check_against(&self, ctx: &ContextModel<T>) -> Result<()> {
        if !self.q0().same_symbols(ctx.q0()) {
            return Err(config_err!("channel q0 alphabet {} does not match context {}", self.q0(), ctx.q0()));
        }
        if !self.q1_extra().same_symbols(ctx.q1_extra()) {
            return Err(config_err!(
                "channel q1t alphabet {} does not match context {}",
                self.q1_extra(),
                ctx.q1_extra()
            ));
        }
        Ok(())
    }

    /// Average out the sender-private context: `p(x|s,q0) = sum_q1t p(q1t|q0) p(x|s,q0,q1t)`.
    ///
    /// The result is indexed by a degenerate `q1t`, matching [`ContextModel::collapse_q1_extra`].
    pub fn average_q1_extra(&self, ctx: &ContextModel<T>) -> Result<Self> {
        self.check_against(ctx)?;
        let pq1 = ctx.sender_marginal();
        let k1 = ctx.q1_extra().size();
        let nx = self.x().size();
        Self::from_fn(
            self.q0().clone(),
            Alphabet::degenerate(Q1T),
            self.s().clone(),
            self.x().clone(),
            |q0, _, s| {
                let mass: T = (0..k1).map(|t| pq1[q0 * k1 + t]).sum();
                let mut out = vec![T::zero(); nx];
                for t in 0..k1 {
                    let w = if mass > T::zero() {
                        pq1[q0 * k1 + t] / mass
                    } else {
                        T::one() / T::from_usize(k1).unwrap()
                    };
                    for (o, p) in out.iter_mut().zip(self.row(q0, t, s)) {
                        *o = *o + w * *p;
                    }
                }
                out
            },
        )
    }
}

/// Auxiliary distribution `p(u | q0, q1t)` plus the deterministic map `s = f(u, q0, q1t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuxiliaryScheme<T> {
    pu_given_q1: CondPmf<T>,
    s: Alphabet,
    /// `f[(sender_index) * |U| + u]`.
    f: Vec<usize>,
}

impl<T: Real> AuxiliaryScheme<T> {
    /// `pu` rows are indexed by `(q0, q1t)`; `f` is flat over `(q0, q1t, u)` with `u` fastest.
    pub fn new(pu_given_q1: CondPmf<T>, s: Alphabet, f: Vec<usize>) -> Result<Self> {
        let g = pu_given_q1.given();
        if g.len() != 2 || g[0].name() != Q0 || g[1].name() != Q1T || pu_given_q1.target().name() != U {
            return Err(config_err!("scheme law must be p(u | q0, q1t)"));
        }
        let cells = pu_given_q1.num_rows() * pu_given_q1.target().size();
        if f.len() != cells {
            return Err(config_err!("map f needs {cells} entries, got {}", f.len()));
        }
        if let Some((i, v)) = f.iter().enumerate().find(|(_, v)| **v >= s.size()) {
            return Err(config_err!("map f entry {i} is {v}, outside s alphabet of size {}", s.size()));
        }
        Ok(Self {
            pu_given_q1,
            s: s.renamed(S),
            f,
        })
    }

    /// Build from closures over `(q0, q1t)` and `(u, q0, q1t)`.
    pub fn from_fns<P, F>(ctx: &ContextModel<T>, u: Alphabet, s: Alphabet, mut pu: P, mut f: F) -> Result<Self>
    where
        P: FnMut(usize, usize) -> Vec<T>,
        F: FnMut(usize, usize, usize) -> usize,
    {
        let nu = u.size();
        let law = CondPmf::from_rows(
            vec![ctx.q0().renamed(Q0), ctx.q1_extra().renamed(Q1T)],
            u.renamed(U),
            |i| pu(i[0], i[1]),
        )?;
        let mut map = Vec::with_capacity(ctx.num_sender_contexts() * nu);
        for a in 0..ctx.q0().size() {
            for b in 0..ctx.q1_extra().size() {
                for uu in 0..nu {
                    map.push(f(uu, a, b));
                }
            }
        }
        Self::new(law, s, map)
    }

    /// `u = s` with `p(s | q0, q1t)` given per sender context.
    pub fn direct(ctx: &ContextModel<T>, s: Alphabet, ps: &[Vec<T>]) -> Result<Self> {
        let k1 = ctx.q1_extra().size();
        Self::from_fns(ctx, s.renamed(U), s, |a, b| ps[a * k1 + b].clone(), |u, _, _| u)
    }

    pub fn pu_given_q1(&self) -> &CondPmf<T> {
        &self.pu_given_q1
    }

    pub fn u(&self) -> &Alphabet {
        self.pu_given_q1.target()
    }

    pub fn s(&self) -> &Alphabet {
        &self.s
    }

    pub fn q0(&self) -> &Alphabet {
        &self.pu_given_q1.given()[0]
    }

    pub fn q1_extra(&self) -> &Alphabet {
        &self.pu_given_q1.given()[1]
    }

    /// Flat map table, `(q0, q1t, u)` with `u` fastest.
    pub fn f_table(&self) -> &[usize] {
        &self.f
    }

    pub fn f(&self, u: usize, q0: usize, q1t: usize) -> usize {
        let q1 = q0 * self.q1_extra().size() + q1t;
        self.f[q1 * self.u().size() + u]
    }

    /// `p(. | q0, q1t)`.
    pub fn pu_row(&self, q0: usize, q1t: usize) -> &[T] {
        self.pu_given_q1.row_for(&[q0, q1t])
    }

    pub fn check_against(&self, ch: &SemanticChannel<T>, ctx: &ContextModel<T>) -> Result<()> {
        if !self.q0().same_symbols(ctx.q0()) || !self.q1_extra().same_symbols(ctx.q1_extra()) {
            return Err(config_err!("scheme is indexed by different sender context alphabets than the context model"));
        }
        if !self.s.same_symbols(ch.s()) {
            return Err(config_err!("scheme maps into {} but channel input is {}", self.s, ch.s()));
        }
        Ok(())
    }
}

/// Joint law of `(q0, q1t, q2t, u, s, x)`:
/// `p(q0,q1t,q2t) p(u|q0,q1t) 1{s = f(u,q0,q1t)} p(x|s,q0,q1t)`.
pub fn induced_joint<T: Real>(
    ch: &SemanticChannel<T>,
    ctx: &ContextModel<T>,
    scheme: &AuxiliaryScheme<T>,
) -> Result<JointPmf<T>> {
    ch.check_against(ctx)?;
    scheme.check_against(ch, ctx)?;
    let vars = vec![
        ctx.q0().clone(),
        ctx.q1_extra().clone(),
        ctx.q2_extra().clone(),
        scheme.u().clone(),
        ch.s().clone(),
        ch.x().clone(),
    ];
    let shape = Shape::of(&vars);
    let mut probs = vec![T::zero(); shape.len()];
    let d = shape.dims().to_vec();
    for a in 0..d[0] {
        for b in 0..d[1] {
            let pu = scheme.pu_row(a, b);
            for c in 0..d[2] {
                let pc = ctx.prob(a, b, c);
                if pc == T::zero() {
                    continue;
                }
                for (u, &pu) in pu.iter().enumerate() {
                    let s = scheme.f(u, a, b);
                    for (x, &px) in ch.row(a, b, s).iter().enumerate() {
                        probs[shape.flat(&[a, b, c, u, s, x])] = pc * pu * px;
                    }
                }
            }
        }
    }
    JointPmf::new(vars, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::conditional_mutual_information;

    fn bits(name: &str) -> Alphabet {
        Alphabet::indexed(name, 2).unwrap()
    }

    #[test]
    fn scenario_rules() {
        let full = ContextModel::<f64>::trivial();
        assert!(validate_scenario(&full, Scenario::FullShared).ok);

        let sk = ContextModel::<f64>::new(
            Alphabet::degenerate(Q0),
            Alphabet::degenerate(Q1T),
            Alphabet::indexed(Q2T, 3).unwrap(),
            vec![1.0 / 3.0; 3],
        )
        .unwrap();
        let check = validate_scenario(&sk, Scenario::SenderKnowsMore);
        assert!(!check.ok);
        assert!(check.diagnostics[0].contains("Q2t must be degenerate"));
        assert!(validate_scenario(&sk, Scenario::ReceiverKnowsMore).ok);
        assert!(validate_scenario(&sk, Scenario::PartialShared).ok);
        assert!(!validate_scenario(&sk, Scenario::FullShared).ok);
    }

    #[test]
    fn scenario_parses_case_insensitively() {
        assert_eq!("fullshared".parse::<Scenario>().unwrap(), Scenario::FullShared);
        assert!("Everything".parse::<Scenario>().is_err());
    }

    #[test]
    fn identity_chain_concentrates_on_diagonal() {
        let ctx = ContextModel::<f64>::trivial();
        let s = Alphabet::indexed(S, 3).unwrap();
        let ch = SemanticChannel::context_free(
            &ctx,
            s.clone(),
            Alphabet::indexed(X, 3).unwrap(),
            &(0..3).map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect::<Vec<_>>(),
        )
        .unwrap();
        let scheme = AuxiliaryScheme::direct(&ctx, s, &[vec![0.2, 0.3, 0.5]]).unwrap();
        let j = induced_joint(&ch, &ctx, &scheme).unwrap();
        j.for_each_cell(|i, p| {
            if p > 0.0 {
                assert!(i[3] == i[4] && i[4] == i[5]);
            }
        });
    }

    #[test]
    fn constant_map_gives_point_mass_on_s() {
        let ctx = ContextModel::<f64>::trivial();
        let ch = SemanticChannel::context_free(&ctx, bits(S), bits(X), &[vec![0.9, 0.1], vec![0.2, 0.8]])
            .unwrap();
        let scheme =
            AuxiliaryScheme::from_fns(&ctx, bits(U), bits(S), |_, _| vec![0.5, 0.5], |_, _, _| 1).unwrap();
        let j = induced_joint(&ch, &ctx, &scheme).unwrap();
        assert_eq!(j.pmf_of(S).unwrap().probs(), &[0.0, 1.0]);
    }

    #[test]
    fn markov_and_context_consistency() {
        let ctx = ContextModel::<f64>::new(
            bits(Q0),
            bits(Q1T),
            bits(Q2T),
            vec![0.1, 0.05, 0.2, 0.15, 0.05, 0.1, 0.25, 0.1],
        )
        .unwrap();
        let ch = SemanticChannel::from_fn(bits(Q0), bits(Q1T), bits(S), bits(X), |a, b, s| {
            let e = 0.1 + 0.2 * a as f64 + 0.15 * b as f64;
            if s == 0 {
                vec![1.0 - e, e]
            } else {
                vec![e, 1.0 - e]
            }
        })
        .unwrap();
        let u = Alphabet::indexed(U, 3).unwrap();
        let scheme = AuxiliaryScheme::from_fns(
            &ctx,
            u,
            bits(S),
            |a, b| vec![0.2 + 0.1 * a as f64, 0.5 - 0.1 * b as f64, 0.3 - 0.1 * a as f64 + 0.1 * b as f64],
            |u, a, b| (u + a + b) % 2,
        )
        .unwrap();
        let j = induced_joint(&ch, &ctx, &scheme).unwrap();
        let back = j.marginalize(&[Q0, Q1T, Q2T]).unwrap();
        for (x, y) in back.probs().iter().zip(ctx.joint().probs()) {
            assert!((x - y).abs() < 1e-12);
        }
        let cmi = conditional_mutual_information(&j, &[U], &[X], &[S, Q0, Q1T]).unwrap();
        assert!(cmi.abs() < 1e-9);
    }

    #[test]
    fn alphabet_mismatch_rejected() {
        let ctx = ContextModel::<f64>::shared(bits(Q0), vec![0.5, 0.5]).unwrap();
        let other = ContextModel::<f64>::trivial();
        let ch = SemanticChannel::context_free(&other, bits(S), bits(X), &[vec![1.0, 0.0], vec![0.0, 1.0]])
            .unwrap();
        let scheme = AuxiliaryScheme::direct(&ctx, bits(S), &[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(matches!(induced_joint(&ch, &ctx, &scheme), Err(Error::Config(_))));
    }

    #[test]
    fn f_out_of_range_rejected() {
        let ctx = ContextModel::<f64>::trivial();
        let r = AuxiliaryScheme::from_fns(&ctx, bits(U), bits(S), |_, _| vec![0.5, 0.5], |_, _, _| 2);
        assert!(r.is_err());
    }

    #[test]
    fn collapsing_private_parts() {
        let ctx = ContextModel::<f64>::new(
            bits(Q0),
            bits(Q1T),
            bits(Q2T),
            vec![0.1, 0.05, 0.2, 0.15, 0.05, 0.1, 0.25, 0.1],
        )
        .unwrap();
        let c1 = ctx.collapse_q1_extra();
        assert!(c1.q1_extra().is_degenerate());
        assert!((c1.prob(0, 0, 1) - 0.2).abs() < 1e-12);
        let c2 = ctx.collapse_q2_extra();
        assert!((c2.prob(1, 1, 0) - 0.35).abs() < 1e-12);
    }
}
