use std::collections::BTreeMap;

use serde::Serialize;

use super::blahut::{blahut_arimoto, BlahutConfig};
use crate::channel::{
    induced_joint, require_scenario, AuxiliaryScheme, ContextModel, RateKind, Scenario,
    SemanticChannel, Q0, Q1T, Q2T, S, U, X,
};
use crate::error::Result;
use crate::prob::{conditional_mutual_information, CondPmf, JointPmf};
use crate::scalar::Real;

pub const TERM_UX_Q2: &str = "iUX_given_Q2";
pub const TERM_UQ1T_Q0: &str = "iUQ1t_given_Q0";
pub const TERM_UQ2T_Q0: &str = "iUQ2t_given_Q0";
pub const TERM_SX_Q1: &str = "iSX_given_Q1";

/// The conditional mutual informations every scenario's rate is assembled from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateTerms<T> {
    /// `I(U; X | Q0, Q2t)`
    pub ux_given_q2: T,
    /// `I(U; Q1t | Q0)`
    pub uq1t_given_q0: T,
    /// `I(U; Q2t | Q0)`
    pub uq2t_given_q0: T,
    /// `I(S; X | Q0, Q1t)`
    pub sx_given_q1: T,
}

impl<T: Real> RateTerms<T> {
    pub fn from_joint(joint: &JointPmf<T>) -> Result<Self> {
        Ok(Self {
            ux_given_q2: conditional_mutual_information(joint, &[U], &[X], &[Q0, Q2T])?,
            uq1t_given_q0: conditional_mutual_information(joint, &[U], &[Q1T], &[Q0])?,
            uq2t_given_q0: conditional_mutual_information(joint, &[U], &[Q2T], &[Q0])?,
            sx_given_q1: conditional_mutual_information(joint, &[S], &[X], &[Q0, Q1T])?,
        })
    }

    /// The scenario's rate expression applied to these terms.
    ///
    /// * `FullShared`: `I(U;X|Q2)` (with `Q2 = Q1`)
    /// * `SenderKnowsMore`: `I(U;X|Q2) - I(U;Q1t|Q0)`
    /// * `ReceiverKnowsMore`: `I(U;X|Q2) + I(U;Q2t|Q0)`
    /// * `PartialShared`: `I(U;X|Q2) + I(U;Q2t|Q0) - I(U;Q1t|Q0)`
    pub fn rate(&self, scenario: Scenario) -> T {
        match scenario {
            Scenario::FullShared => self.ux_given_q2,
            Scenario::SenderKnowsMore => self.ux_given_q2 - self.uq1t_given_q0,
            Scenario::ReceiverKnowsMore => self.ux_given_q2 + self.uq2t_given_q0,
            Scenario::PartialShared => self.ux_given_q2 + self.uq2t_given_q0 - self.uq1t_given_q0,
        }
    }

    pub fn breakdown(&self) -> BTreeMap<String, T> {
        BTreeMap::from([
            (TERM_UX_Q2.to_string(), self.ux_given_q2),
            (TERM_UQ1T_Q0.to_string(), self.uq1t_given_q0),
            (TERM_UQ2T_Q0.to_string(), self.uq2t_given_q0),
            (TERM_SX_Q1.to_string(), self.sx_given_q1),
        ])
    }
}

/// What attains the reported rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Argmax<T> {
    /// Input law `p(s | q0, q1t)` from the full-CSI capacity computation.
    InputLaw(CondPmf<T>),
    Scheme(AuxiliaryScheme<T>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub stage: String,
    pub iteration: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport<T> {
    pub scenario: Scenario,
    pub kind: RateKind,
    pub rate_bits: T,
    pub term_breakdown: BTreeMap<String, T>,
    pub optimizer_trace: Vec<TraceEntry>,
    pub argmax: Argmax<T>,
    /// For searches over maps `f`: whether every map was visited.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<bool>,
}

/// Rate of a fixed scheme under the scenario's expression.
pub fn evaluate_rate<T: Real>(
    ch: &SemanticChannel<T>,
    ctx: &ContextModel<T>,
    scheme: &AuxiliaryScheme<T>,
    scenario: Scenario,
) -> Result<RateReport<T>> {
    require_scenario(ctx, scenario)?;
    let joint = induced_joint(ch, ctx, scheme)?;
    let terms = RateTerms::from_joint(&joint)?;
    Ok(RateReport {
        scenario,
        kind: scenario.rate_kind(),
        rate_bits: terms.rate(scenario),
        term_breakdown: terms.breakdown(),
        optimizer_trace: Vec::new(),
        argmax: Argmax::Scheme(scheme.clone()),
        exhaustive: None,
    })
}

/// Capacity with the same context at both ends: `sum_q1 p(q1) C(q1)`, where
/// `C(q1)` is the capacity of `p(x | s, q1)` found by alternating maximization.
pub fn capacity_full_csi<T: Real>(ch: &SemanticChannel<T>, ctx: &ContextModel<T>) -> Result<RateReport<T>> {
    capacity_full_csi_with(ch, ctx, &BlahutConfig::default())
}

pub fn capacity_full_csi_with<T: Real>(
    ch: &SemanticChannel<T>,
    ctx: &ContextModel<T>,
    cfg: &BlahutConfig,
) -> Result<RateReport<T>> {
    require_scenario(ctx, Scenario::FullShared)?;
    ch.check_against(ctx)?;
    let pq1 = ctx.sender_marginal();
    let ns = ch.s().size();
    let mut inputs: Vec<Vec<T>> = Vec::with_capacity(pq1.len());
    let mut rate = T::zero();
    let mut trace = Vec::new();
    for q0 in 0..ctx.q0().size() {
        let rows: Vec<&[T]> = (0..ns).map(|s| ch.row(q0, 0, s)).collect();
        let res = blahut_arimoto(&rows, cfg);
        let label = format!("q0={}", ctx.q0().symbol(q0));
        trace.extend(res.history.iter().enumerate().map(|(i, v)| TraceEntry {
            stage: label.clone(),
            iteration: i + 1,
            value: v.as_f64(),
        }));
        rate = rate + pq1[q0] * res.capacity;
        inputs.push(res.input);
    }
    let law = CondPmf::from_rows(
        vec![ctx.q0().clone(), ctx.q1_extra().clone()],
        ch.s().clone(),
        |i| inputs[i[0]].clone(),
    )?;
    let scheme = AuxiliaryScheme::direct(ctx, ch.s().clone(), &inputs)?;
    let terms = RateTerms::from_joint(&induced_joint(ch, ctx, &scheme)?)?;
    let mut breakdown = terms.breakdown();
    breakdown.insert(TERM_SX_Q1.to_string(), rate);
    Ok(RateReport {
        scenario: Scenario::FullShared,
        kind: RateKind::Capacity,
        rate_bits: rate,
        term_breakdown: breakdown,
        optimizer_trace: trace,
        argmax: Argmax::InputLaw(law),
        exhaustive: None,
    })
}
