pub mod error;
pub mod fock;
pub mod lattice;
pub mod linalg;
pub mod pair_index;
pub mod samples;

pub use error::{Error, Result};
pub use linalg::{c64, ComplexMatrix, Projection};
