//! Hyperplanes, compact sets and their projections.

pub mod compact;
pub mod hyperplane;
pub mod path;
pub mod raster;

pub use compact::{dilate, hat_contains, hat_dilate_contains, random_unit, CompactSet, SetKind};
pub use hyperplane::Hyperplane;
pub use path::{escape_path, find_separating_hyperplane, is_linearly_convex, BrokenLine, ConvexityReport};
pub use raster::{complement_connected, project, project_sampled, ProjectionRegion};
