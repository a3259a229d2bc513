//! Executable checks of the transform identities and the support theorem. Every check
//! compares two independently computed quantities and returns an [`ExperimentReport`].

pub mod bridge;
pub mod geometry;
pub mod identities;
pub mod report;
pub mod support;

pub use bridge::{check_real_radon_bridge, BridgeParams};
pub use geometry::{check_geometry, union_find_components, GeometryParams};
pub use identities::{
    check_calibration, check_dual_bound, check_duality, check_forward, check_lemma1, check_round_trip,
    default_probes, dual_bound_probes, CalibrationCheck, DualBoundCheck, ForwardCheck, PairingParams,
    RoundTripCheck,
};
pub use report::{CheckRecord, ExperimentReport, Status};
pub use support::{support_converse, support_forward, test_functions_off_hat, SupportParams};
