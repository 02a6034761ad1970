pub mod careers;
pub mod config;
pub mod corpus;
pub mod countries;
pub mod error;
pub mod gender;
pub mod names;
pub mod pipeline;
pub mod stats;
pub mod validation;

pub use config::AnalysisConfig;
pub use error::{Error, Result};
