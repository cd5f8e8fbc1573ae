//! Single-photon transport through two tight-binding waveguides coupled by a
//! chain of driven Λ-type three-level atoms.
//!
//! * [`model`]: parameters, site indexing and free-chain kinematics.
//! * [`dynamics`]: Gaussian packets and norm-preserving time propagation
//!   under a piecewise-constant control field.
//! * [`scattering`]: stationary transmission and reflection spectra.
//! * [`observables`]: channel probabilities, atomic occupations, pulse
//!   detection and the in-junction velocity.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod dynamics;
pub mod error;
mod math;
pub mod model;
pub mod observables;
pub mod scattering;

pub use error::{Error, Result};
