//! Exact counting of commuting matrix pairs, commutator fibres and matrix
//! exponential sums over prime fields, with the integer-box counting
//! function `N(T)` and the harmonic-analysis bookkeeping around it.

pub mod cli;
pub mod conjugacy;
pub mod error;
pub mod expsum;
pub mod ff;
pub mod flatcheck;
pub mod harmonic;
pub mod matfp;
pub mod matz;
pub mod report;

pub use error::{Budget, Error, Result};
pub use ff::{FieldCtx, Poly};
pub use matfp::{Block, BlockSplit, MatF};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
