//! Windowed Green function solver for scattering by open dielectric
//! waveguides in two dimensions.

#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod geometry;
pub mod incident;
pub mod kernels;
pub mod modes;
pub mod operators;
pub mod output;
pub mod quad;
pub mod scene_io;
pub mod scenes;
pub mod solver;
pub mod specialfn;
pub mod study;
pub mod window;

pub use error::{Error, Result};
