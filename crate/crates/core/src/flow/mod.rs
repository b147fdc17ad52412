//! Homogeneous Ricci flow vector fields and their numerical integration.

mod integrate;
mod irreducible;
mod rhs;
pub mod stepper;

pub use integrate::{
    integrate, Direction, IntegrationOptions, Method, Sample, Termination, Trajectory,
    BLOWUP_NORM, COLLAPSE_STEP_FRACTION,
};
pub use irreducible::{irreducible_flow, product_flow, IrreducibleFlow};
pub use rhs::{
    curvature_proxy, first_integral, ratio_rate, rhs_general, rhs_two, scalar_curvature,
    MetricState, FIRST_INTEGRAL_ROOT_TOL,
};
