//! Evolutionary rule-based regression with Kolmogorov-Arnold network
//! consequents, the single-model baselines it is compared against, and the
//! benchmarking and statistics needed to reproduce the comparisons.

pub mod bench;
pub mod data;
pub mod error;
pub mod evo;
pub mod kan;
pub mod linear;
pub mod mlp;
pub mod model;
pub mod optim;
pub mod spline;
pub mod stats;
mod util;

pub use error::{Error, Result};
pub use util::mix_seed;
