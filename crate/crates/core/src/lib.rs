//! Cone-union constructions for constant-width bodies.
//!
//! This crate builds and numerically certifies unions of congruent right
//! spherical cones whose apexes lie on the unit sphere and whose bases lie on
//! a concentric sphere of radius `R`. When the apex set keeps pairwise
//! spherical distances inside an annulus `[psi, pi - psi]`, the union has
//! diameter `d` and embeds in a constant-width body whose illumination number
//! is bounded below by a cap-covering count. The crate reproduces the
//! governing constants (`R0 ~ 0.905`, `tau ~ 1.047`, and the `R = 1`
//! baseline `tau ~ 1.026`) and checks every step against independent
//! brute-force oracles at desk scale.
//!
//! Modules:
//! - [`geometry`]: cone parametrization, closed forms, the optimal radius.
//! - [`diameter`]: pairwise diameter conditions and the sampled oracle.
//! - [`sphere`]: annulus codes and cap-covering multiplicity.
//! - [`illum`]: blocking verdicts, witnesses, and counting certificates.
//! - [`optimizer`]: feasibility region and tau-maximization.

pub mod diameter;
pub mod direction;
pub mod error;
pub mod geometry;
pub mod illum;
pub mod optimizer;
pub mod rng;
pub mod sphere;

pub use diameter::{
    check_pair, diameter_oracle, verify_configuration, Configuration, DiameterEstimate,
    DiameterVerdict, PairVerdict,
};
pub use direction::Direction;
pub use error::{Error, Result};
pub use geometry::{solve_optimal_r, Cone, ConeParams, OptimalConstants, SphericalCap};
pub use illum::{
    blocking_witness, counting_lower_bound, greedy_apex_cover, illumination_cap, is_blocked,
    Certificate, IlluminationCap,
};
pub use optimizer::{evaluate, maximize_tau, psi_required, FeasibilityRecord, TauSweep};
pub use sphere::{
    cap_multiplicity, generate_annulus_code, max_multiplicity, sample_uniform, AnnulusCode,
    GeneratedCode, MultiplicityMode, MultiplicityReport,
};
