//! Numerical laboratory for the sharp one-dimensional Strichartz inequality
//! `||exp(it Laplacian) f||_{L^6(R^2)} <= C ||f||_{L^2(R)}`.
//!
//! The crate evaluates the free Schrödinger flow spectrally, computes the
//! Strichartz ratio and the sextic form `Q` by two independent routes, runs a
//! normalized fixed-point iteration for the Euler-Lagrange equation, certifies
//! Gaussian profiles through the multiplicative functional equation, and
//! measures the bilinear and Fourier-decay quantities behind the analyticity
//! argument. The `strichartz-lab` binary wraps each pipeline as a seeded,
//! reproducible experiment.
//!
//! Fourier convention throughout: `f^(xi) = int exp(-i x xi) f(x) dx`, with
//! inverse `f(x) = (1/2pi) int exp(i x xi) f^(xi) dxi`; no unitary rescaling.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bilinear;
pub mod decay;
pub mod error;
pub mod extremizer;
pub mod functional;
pub mod harness;
pub mod lattice;
pub mod multilinear;
pub mod propagator;
pub mod quadrature;

pub use error::{AliasingWarning, Checked, LabError, Result};
pub use lattice::{FrequencyGrid, Spectrum, UniformGrid, WaveFunction};

pub type C64 = num_complex::Complex64;
