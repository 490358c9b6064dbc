//! Torsional optomechanics of a dielectric windmill rotor in a cavity driven
//! by Laguerre-Gaussian modes with angular and radial nodes.
//!
//! The pipeline runs [`lgmode`] → [`windmill`] → [`coupling`]: the rotor's
//! overlap with the standing-wave intensity gives the cavity frequency shift,
//! whose angular derivative sets the coupling g. [`decoherence`] rescales a
//! reference scattering rate by the intercepted intensity fraction and
//! [`model`] checks the resulting Hamiltonian spectrum.

pub mod coupling;
pub mod decoherence;
pub mod error;
pub mod lgmode;
pub mod model;
pub mod quadrature;
pub mod specfun;
pub mod windmill;

pub use coupling::{Cavity, CouplingOptions, CouplingResult, Method};
pub use decoherence::DecoherenceInput;
pub use error::{Error, Result};
pub use lgmode::{CylindricalPoint, LgMode};
pub use windmill::{RotorPose, Windmill};
