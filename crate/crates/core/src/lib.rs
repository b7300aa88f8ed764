pub mod analysis;
pub mod caching;
pub mod channel;
pub mod checks;
pub mod config;
pub mod error;
pub mod experiment;
pub mod mobility;
pub mod scenario;
pub mod simulator;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
