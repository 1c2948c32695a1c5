//! Adaptive triadic network dynamics: tensors with isotypic splitting, four
//! built-in models, a fixed-step RK4 integrator, regime and closure analysis,
//! and Δ-set extraction.

pub mod analysis;
pub mod complex;
pub mod error;
pub mod experiment;
pub mod init;
pub mod integrator;
pub mod models;
pub mod tensor;
pub mod tolerances;

pub use error::{Error, Result};
