//! Context-dependent semantic channels.
//!
//! A sender maps a semantic into a message through a channel `p(x | s, q1)`
//! whose law depends on context. Sender and receiver each see part of that
//! context: a shared component `q0`, a sender-private `q1t` and a
//! receiver-private `q2t`. This crate provides
//!
//! * exact finite-alphabet probability tables and information measures ([`prob`]),
//! * the semantics/messages/context triple and its disambiguation check ([`semantic_map`]),
//! * the channel, context and auxiliary-scheme model ([`channel`]),
//! * rate and capacity solvers for the four context-knowledge scenarios ([`solver`]),
//! * a random-binning, joint-typicality codec with Monte Carlo harness ([`codec`]),
//! * brute-force baselines used to validate all of the above ([`oracle`]).
//!
//! Numeric types are generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix `f64`, which is what the CLI uses.

pub mod channel;
pub mod codec;
mod error;
pub mod oracle;
pub mod prob;
mod scalar;
pub mod seed;
pub mod semantic_map;
pub mod solver;

pub use channel::{
    induced_joint, validate_scenario, RateKind, Scenario, ScenarioCheck,
};
pub use error::{Error, Result};
pub use prob::Alphabet;
pub use scalar::Real;

pub type Pmf = prob::Pmf<f64>;
pub type CondPmf = prob::CondPmf<f64>;
pub type JointPmf = prob::JointPmf<f64>;
pub type SemanticMap = semantic_map::SemanticMap<f64>;
pub type ContextModel = channel::ContextModel<f64>;
pub type SemanticChannel = channel::SemanticChannel<f64>;
pub type AuxiliaryScheme = channel::AuxiliaryScheme<f64>;
pub type RateReport = solver::RateReport<f64>;
