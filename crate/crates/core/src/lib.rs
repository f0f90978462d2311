pub mod error;
pub mod harness;
pub mod linalg;
pub mod means;
pub mod pairs;
pub mod posmaps;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
