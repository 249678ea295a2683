// `!(v > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod config;
pub mod diagnostics;
pub mod environment;
pub mod error;
pub mod experiment;
pub mod game;
pub mod learner;
pub mod output;
pub mod solver;

pub use error::{Error, Result};
