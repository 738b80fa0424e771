//! Rate and capacity computation for the four context-knowledge scenarios.

mod blahut;
mod optimize;
mod rate;
mod simplex;

pub use blahut::{blahut_arimoto, BlahutConfig, BlahutResult};
pub use optimize::{default_u_size, optimize_rate, SearchConfig};
pub(crate) use optimize::{map_count, map_digits};
pub use rate::{
    capacity_full_csi, capacity_full_csi_with, evaluate_rate, Argmax, RateReport, RateTerms,
    TraceEntry, TERM_SX_Q1, TERM_UQ1T_Q0, TERM_UQ2T_Q0, TERM_UX_Q2,
};
pub use simplex::project_to_simplex;
