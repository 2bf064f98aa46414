pub mod backtest;
pub mod cli;
pub mod error;
pub mod fit;
pub mod ingest;
pub mod montecarlo;
pub mod series;
pub mod signal;

pub use error::{Error, Result};
