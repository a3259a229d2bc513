//! Quadrature, finite differences and convolutions.

pub mod convolution;
pub mod derivative;
pub mod gauss;
pub mod hyperplane_quad;
pub mod profile;
pub mod sgrid;
pub mod sinogram;
pub mod sphere;
pub mod sum;

pub use convolution::{convolve_cn, convolve_s, ConvolutionRule};
pub use derivative::s_derivative;
pub use gauss::{gauss_legendre, Rule1D};
pub use hyperplane_quad::{hyperplane_quadrature, BallRule, BidiskRule, HyperplaneFrame, PolarRule, QuadParams};
pub use profile::{Jet, Profile, Slot};
pub use sgrid::SGrid;
pub use sinogram::Sinogram;
pub use sphere::{integrate_sphere, SphereGrid, SPHERE_AREA};
pub use sum::{pairwise_sum, pairwise_sum_real};
