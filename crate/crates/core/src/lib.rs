pub mod error;
pub mod lattice;
pub mod potentials;
pub mod quad;
pub mod scattering;
pub mod fock;
pub mod sparse;
pub mod spectra;

pub use error::{Error, Result};
