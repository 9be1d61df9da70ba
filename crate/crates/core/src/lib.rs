//! Household trip prediction pipeline: survey-shaped tabular ingestion and
//! cleaning, z-score scaling, a small dense network trained by
//! backpropagation, grid-search cross-validation of batch size and epochs,
//! and MAPE-based evaluation with loss-curve and prediction-pair exports.

pub mod data;
pub mod error;
pub mod eval;
pub mod nn;
pub mod numerics;
pub mod store;
pub mod train;
pub mod tune;
pub mod util;

pub use error::{Error, Result};
