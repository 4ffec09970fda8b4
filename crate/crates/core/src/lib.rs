pub mod datagen;
pub mod embed;
pub mod eval;
pub mod error;
pub mod graph;
pub mod miner;
pub mod multilayer;
pub mod pattern;
pub mod predictor;
pub mod rules;
pub mod signed;

pub use error::{Error, Result};
