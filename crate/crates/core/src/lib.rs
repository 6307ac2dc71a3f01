//! Bosonic linear-optics simulation of N-photon hyperentanglement concentration.
//!
//! Modules, bottom-up:
//! - [`fock`]: sparse Fock states over labelled optical modes.
//! - [`optics`]: optical elements, circuits, and circuit application.
//! - [`oracle`]: permanent-based reference amplitudes.
//! - [`devices`]: parity-check and single-photon measurement devices.
//! - [`protocol`]: the two-copy and auxiliary-photon concentration protocols.

pub mod devices;
pub mod error;
pub mod fock;
pub mod optics;
pub mod oracle;
pub mod protocol;

pub use error::{Error, Result};
pub use fock::{CopyId, FockState, ModeId, ModeTable, Occupation, Path, PhotonPaths, Polarization, Spatial, StateParams};
pub use num_complex::Complex64;
pub use optics::{Element, OpticalCircuit, Unitary};
