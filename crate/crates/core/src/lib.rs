//! Geometric edge elimination for the Euclidean travelling salesman problem.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod instance;
pub mod harness;
pub mod hs;
pub mod jv;
pub mod montecarlo;
pub mod oracle;
pub mod rng;

pub use error::{Error, Result};
pub use geometry::{dist, Point};
pub use instance::{DensitySpec, Instance};
