//! Quantum Fisher information of a static two-level atom driven by vacuum
//! fluctuations of the electromagnetic field, in free space and in front of
//! a perfectly reflecting plane.

pub mod boundary;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod metrology;
pub mod qfi;
pub mod types;

pub use dynamics::DissipatorCoefficients;
pub use error::{Error, Result};
pub use qfi::{Method, ParameterTag};
pub use types::{
    bloch_from_angles, bloch_from_density, density_from_bloch, AtomSpec, BlochVector,
    DensityMatrix2, Environment, Polarization, Warning,
};
