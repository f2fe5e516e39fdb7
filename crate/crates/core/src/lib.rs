pub mod cli;
pub mod clustering;
pub mod config;
pub mod error;
pub mod growth;
pub mod market;
pub mod pipeline;
pub mod planner;
pub mod profiles;
pub mod scenarios;
pub mod study;
pub mod synthetic;

pub use error::{Error, Result};
