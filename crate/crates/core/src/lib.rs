//! Spectral-measure kernels on convex cocompact hyperbolic quotients of H³.
//!
//! The crate is `no_std` (with `alloc`). It covers exact upper half-space
//! geometry, orbit enumeration for Schottky-type groups, Poincaré series and
//! critical-exponent estimation, the closed-form spectral measure of
//! `(Δ - 1)_+^{1/2}` on H³, its method-of-images sum over a group, and a
//! harness that checks pointwise kernel envelopes on parameter grids.
//!
//! File formats, configuration and the command-line front end live in the
//! `hypspec` crate.

#![no_std]
#![deny(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod exponent;
pub mod fit;
pub mod geometry;
pub mod group;
pub mod images;
pub mod kernel;
pub mod sum;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{BallPoint, Class, HalfSpacePoint, Isometry};
pub use group::{GroupPresentation, OrbitCache, OrbitElement, Word};
