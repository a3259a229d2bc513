//! The complex Radon transform, its dual, inversion and the real-Radon bridge.

pub mod container;
pub mod function;
pub mod radon;
pub mod real;

pub use function::{SmoothFunction, Term, TestFunction};
pub use radon::{
    calibrate_cn, dual, dual_fn, forward, forward_sinogram, forward_with, invert, round_trip, Calibration,
    CalibrationParams, ForwardQuadrature, InversionParams, VolumeGrid, VolumeSpec, C2_ANALYTIC,
};
pub use real::{real_radon_direct, real_radon_from_complex, RealQuadParams};
