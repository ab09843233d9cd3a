//! Compiles and runs the code blocks of the guide as doc tests.

#[doc = include_str!("src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("src/lattice.md")]
pub mod lattice {}

#[doc = include_str!("src/potentials.md")]
pub mod potentials {}

#[doc = include_str!("src/scattering.md")]
pub mod scattering {}

#[doc = include_str!("src/fock.md")]
pub mod fock {}

#[doc = include_str!("src/spectra.md")]
pub mod spectra {}

#[doc = include_str!("src/cli.md")]
pub mod cli {}
