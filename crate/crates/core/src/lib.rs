//! Finite machinery of the one-step cascade symmetric system.

pub mod cascade;
pub mod cli;
pub mod error;
pub mod f2linalg;
pub mod forest;
pub mod names;
pub mod orbits;
pub mod sample;
pub mod selectors;
pub mod verify;

pub use error::{CascadeError, Result};
