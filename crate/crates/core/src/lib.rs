#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod distribution;
pub mod error;
pub mod fitting;
pub mod geometry;
pub mod sampler;
pub mod theta;

pub use distribution::DiscreteGaussian;
pub use error::{Error, Result};
pub use theta::{MultiIndex, SiegelMatrix, ThetaPoint};
