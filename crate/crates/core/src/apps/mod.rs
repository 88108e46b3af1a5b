//! Ready-made problem builders: inverse eigenvalue problems, vanishing
//! quadratic constraints with the ellipsoid special case, and the random
//! instance campaign used to collect iteration and restart statistics.

pub mod campaign;
pub mod iep;
pub mod vqc;

pub use campaign::{run_iep_campaign, run_iep_instance, CampaignConfig, CampaignRow, IepCell, InstanceOutcome, Stats};
pub use iep::{build_iep_feasibility, iep_algebra, iep_dimension, perturbed_start, IepInstance};
pub use vqc::{
    build_ellipsoid_feasibility, build_vqc_feasibility, EllipsoidInstance, EllipsoidProblem, EllipsoidRun,
    LinearLift, QuadraticConstraint, VqcInstance,
};
