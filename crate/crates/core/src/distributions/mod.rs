//! Rapidly decreasing distributions of finite order, mollification and the duality
//! pairing with functions on X = S³ × C.

pub mod measure;
pub mod mollifier;
pub mod mollify;
pub mod pairing;
pub mod xfunction;

pub use measure::{apply, DensityQuad, DistTerm, Measure, TestDistribution};
pub use mollifier::Mollifier;
pub use mollify::{mollified_sinogram, mollify, monomial, BumpRadon, Mollified, MollifiedVolume};
pub use pairing::{dual_of_test, radon_pair, DualFunction};
pub use xfunction::{Coefficient, XFunction, XTerm};
