pub mod error;
pub mod fock_opa;
pub mod oracle;
pub mod atom_optics;
pub mod bragg_stack;
pub mod experiment;
pub mod cli;

pub use error::{Error, Result};
