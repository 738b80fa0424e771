//! Finite-alphabet probability tables and the information measures built on them.

mod alphabet;
mod info;
mod joint;
mod pmf;

pub use alphabet::{Alphabet, ABSENT};
pub(crate) use alphabet::Shape;
pub use info::{
    conditional_entropy, conditional_mutual_information, entropy, mutual_information,
};
pub use joint::JointPmf;
pub use pmf::{CondPmf, Pmf};
