//! Unscented Kalman filtering for pose estimation on SE(3).
//!
//! The filter state is a global pose `T` plus a covariance on the right
//! tangent space at `T`. Time propagation of the sigma points is done on the
//! Lie algebra through the kinematic differential equation of the logarithm,
//! which needs the inverse of the right Jacobian of SE(3); [`lie::se3`]
//! provides it in closed form.
//!
//! Modules:
//! - [`lie`]: SO(3)/SE(3) exponential, logarithm, adjoint and Jacobians
//! - [`stats`]: concentrated Gaussians, tangent-space moments, Karcher mean
//! - [`filters`]: UKF-LA, the group-propagated UKF-LG baseline and UKF-LA-Opt
//! - [`sim`]: ground truth trajectories, measurement synthesis, error metrics
//! - [`experiment`]: case-study runs and the timing benchmark

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod experiment;
pub mod filters;
pub mod kinematics;
pub mod lie;
pub mod linalg;
pub mod sim;
pub mod stats;

pub use error::{Error, Result};
pub use filters::{FilterKind, FilterState, NoiseParams, Ukf, UkfParams, ZetaMode};
pub use lie::{Pose, Rotation, Twist, Velocity};
