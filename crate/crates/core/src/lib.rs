//! Quasi-exactly-solvable spectrum of a parabolic quantum dot with Rashba
//! spin-orbit coupling in a perpendicular magnetic field.
//!
//! Energies are in units of `ħω` throughout. The pipeline is: reduce the
//! physical inputs ([`params`]), build the invariant blocks and their exact
//! determinant polynomials ([`qes`]), and check the resulting energies
//! against a truncated diagonalisation of the full Hamiltonian ([`oracle`]).

pub mod cli;
pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod oracle;
pub mod params;
pub mod poly;
pub mod qes;
pub mod rational;

pub use error::{Error, Result};
pub use params::{block_constants, reduce, BlockConstants, DimensionlessParams, PhysicalParams};
pub use poly::Poly;
pub use rational::Rational;
