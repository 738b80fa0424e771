//! Exponential-cost reference computations used to validate the solver and codec.
//!
//! Everything here trades speed for transparency and refuses work beyond a
//! configurable evaluation budget.

mod capacity;
mod empirical;
mod grid;
mod ml;
mod scheme;

pub use capacity::{exhaustive_capacity, OracleCapacity};
pub use empirical::{empirical_cmi, empirical_mi, MIN_SAMPLES};
pub use grid::{simplex_grid, simplex_grid_size, GridSpec, DEFAULT_GRID_BUDGET};
pub use ml::{ml_decode, MlDecoder, ML_MAX_CODEWORDS};
pub use scheme::{exhaustive_scheme_search, OracleScheme};
