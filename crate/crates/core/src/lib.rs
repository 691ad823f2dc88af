pub mod axioms;
pub mod cli;
pub mod dslio;
pub mod beliefs;
pub mod error;
pub mod events;
pub mod fixtures;
pub mod modelgen;
pub mod multiagent;
pub mod operators;
pub mod rational;
pub mod report;
pub mod theorems;

pub use error::{Error, Result};
