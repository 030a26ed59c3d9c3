//! Excursion-set geometry of smooth planar Gaussian fields.
//!
//! The crate synthesizes stationary centered Gaussian fields on regular
//! grids by convolving white noise with a compactly truncated radial
//! kernel, then studies the geometry of their excursion sets: connected
//! components, crossing events, intrinsic (chemical) distances, boundary
//! contours, and the large-scale crossing structure used to certify
//! short connections. A Monte Carlo campaign runner ties the pieces
//! together and emits deterministic CSV reports.

#![forbid(unsafe_code)]

pub mod boundary_geom;
pub mod chem_dist;
pub mod error;
pub mod excursion;
pub mod experiments;
pub mod geom;
pub mod global_structure;
pub mod grid;
pub mod kernel;
pub mod synth;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
