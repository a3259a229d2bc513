//! Complex Radon transform on C².
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: Gauss–Legendre rules, the Hopf product grid on S³, hyperplane and
//!   C² quadrature, Wirtinger finite differences and convolutions.
//! - [`geometry`]: complex hyperplanes, compact sets with exact projections, rasters of
//!   projections, connectivity and escape paths.
//! - [`transform`]: test functions, the forward transform, its dual, inversion with a
//!   calibrated constant, the real-Radon bridge and the binary containers.
//! - [`distributions`]: finite sums of derivatives of point masses and densities,
//!   mollification and the duality pairing.
//! - [`harness`]: executable checks producing [`harness::ExperimentReport`]s.
//!
//! Throughout, `⟨z, w⟩ = z₁w₁ + z₂w₂` is the bilinear pairing (no conjugation) and
//! Wirtinger derivatives follow `∂_s = ½(∂_a − i∂_b)`, `∂_s̄ = ½(∂_a + i∂_b)`.

// Guards of the form `!(x > 0.0)` also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod numerics;
pub mod point;
pub mod transform;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use point::Point;
