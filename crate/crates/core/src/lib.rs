pub mod error;
pub mod galois;
pub mod harmonic;
pub mod maximal;
pub mod multigraph;
pub mod oriented;
pub mod permgroup;

pub use error::{Error, Result};
