//! Pseudospectral building blocks for incompressible Navier-Stokes and Euler
//! experiments on a uniform periodic box.
//!
//! The crate is organised around a small set of layers:
//!
//! * [`grid`] / [`field`] / [`data`] — the lattice, sampled scalar and vector
//!   fields in physical or spectral representation, discrete `H^m ∩ C^m`
//!   norms, empirical Hölder moduli, and a registry of analytic initial-data
//!   families (including weakly singular radial data).
//! * [`fft`] — a radix-2 complex FFT for power-of-two lines; all transforms
//!   in the crate go through it.
//! * [`kernels`] — the scaled Gaussian heat-kernel family, its first spatial
//!   derivatives and pointwise envelope bounds, the Laplacian fundamental
//!   solution and its gradient, the Biot-Savart kernel, and heat convolution
//!   as a spectral multiplier.
//! * [`leray`] — divergence-free projection (spectral and kernel-quadrature
//!   routes), the pressure-gradient source term, Euler-Leray data functions,
//!   and continuity-modulus estimation.
//! * [`solver`] — Picard iteration for the mild (integral) form of the scaled
//!   equations, forward and time-reversed, with contraction diagnostics, a
//!   windowed global driver, and an independent RK4 pseudospectral reference
//!   integrator.
//! * [`scaling`] — coordinate scaling, damping/growth comparators, parameter
//!   selection rules, and the auto-controlled time-dilatation scheme.
//! * [`vorticity`] / [`decay`] — curl/Biot-Savart transport with blow-up
//!   indicators, polynomial-decay class checks, arctan compactification, and
//!   viscosity-sequence diagnostics.
//!
//! The crate is `no_std`-compatible (`alloc` required); disable the default
//! `std` feature to build without the standard library. IO, file formats and
//! the experiment CLI live in the companion `lerayflow` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod data;
pub mod decay;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod kernels;
pub mod leray;
pub mod math;
pub mod scaling;
pub mod solver;
pub mod vorticity;

pub use error::{Error, Result};
pub use field::{Field, NormReport, Representation, VectorField};
pub use grid::Grid;
