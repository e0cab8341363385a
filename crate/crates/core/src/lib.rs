//! Numerical tools for the ellipticity of periodic two-phase linear elastic
//! composites in 2D: phase tensors, pixel microstructures, a periodic Q1
//! finite element cell problem, and the spectral constants that measure how
//! far strong ellipticity survives homogenization.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod eigen;
pub mod error;
pub mod fem;
pub mod laminate;
pub mod microstructure;
pub mod scalar;
pub mod spectra;
pub mod tensor;

pub use error::{Error, Result};
