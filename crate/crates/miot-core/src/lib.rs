//! Simulation and analysis of Raman-dressed magnetically induced optical
//! transparency (MIOT) in a driven atom-cavity system.
//!
//! The model is a five-mode linear Heisenberg-Langevin system for the cavity
//! field and the collective atomic modes (a_x, B_x, B_y, C_S, C_P). This
//! crate computes the probe transmission spectrum exactly (closed form and by
//! direct steady-state solve), diagonalizes the non-Hermitian drive-free
//! matrix, extracts the MIOT peak position/height/width, and evaluates the
//! pulling coefficients describing the sensitivity of the peak position to
//! frequency fluctuations.
//!
//! All frequencies are stored internally as angular frequencies in rad/s.
//! The crate is `no_std` compatible (alloc required); IO, configuration and
//! the command-line front end live in the companion `miot-cli` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod analysis;
pub mod eigenmodes;
pub mod error;
pub mod langevin;
pub mod linalg;
pub mod params;
pub mod selection;
pub mod spectrum;

pub use error::Error;
pub use linalg::C64;
pub use params::{DerivedQuantities, FluctuationSet, PhysicalParams, RawParams};

/// 2π, for converting ordinary frequencies to angular frequencies.
pub const TAU: f64 = core::f64::consts::TAU;

/// Convenience: `hz(f)` is the angular frequency of an ordinary frequency
/// `f` in Hz.
#[inline]
pub fn hz(f: f64) -> f64 {
    TAU * f
}

/// `khz(f)`: angular frequency of `f` kHz.
#[inline]
pub fn khz(f: f64) -> f64 {
    TAU * f * 1e3
}

/// `mhz(f)`: angular frequency of `f` MHz.
#[inline]
pub fn mhz(f: f64) -> f64 {
    TAU * f * 1e6
}
