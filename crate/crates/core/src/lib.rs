//! Vehicle motion on parametric road surfaces and model-predictive control
//! for nonplanar roads.
//!
//! - [`geom`]: fundamental forms, pose Jacobian and velocity relations of a
//!   body in tangent contact with a surface.
//! - [`surfaces`]: road charts built from curvature, Tait-Bryan angle or
//!   Darboux curvature profiles, plus the road file format.
//! - [`dynamics`]: constrained rigid-body rates, gravity projection and
//!   normal force.
//! - [`vehicle`]: the kinematic bicycle on a surface, its planar counterpart,
//!   integrators and the closed-loop simulator.
//! - [`nlp`]: dual numbers, a dense QP solver and a Gauss-Newton SQP.
//! - [`control`]: nonplanar and planar MPC, speed planner, Stanley.
//! - [`cli`]: scenario files, runs, comparisons and their outputs.

pub mod cli;
pub mod control;
pub mod dynamics;
pub mod geom;
pub mod nlp;
pub mod surfaces;
pub mod vehicle;
