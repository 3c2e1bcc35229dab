//! SO(3) and SE(3) primitives.
//!
//! Twists and velocities are stacked rotation-first, `ξ = [θᵀ, ρᵀ]ᵀ` and
//! `V = [ωᵀ, vᵀ]ᵀ`, matching the adjoint block layout `[[θ̂, 0], [ρ̂, θ̂]]`.
//! Every covariance in this crate inherits that ordering.

pub mod coeffs;
pub mod se3;
pub mod series;
pub mod so3;

mod types;

pub use types::{Pose, Rotation, Twist, Velocity};

use nalgebra::{Matrix3, Matrix4, Matrix6, Vector3, Vector6};
use std::cell::Cell;

pub type Vec3 = Vector3<f64>;
pub type Vec6 = Vector6<f64>;
pub type Mat3 = Matrix3<f64>;
pub type Mat4 = Matrix4<f64>;
pub type Mat6 = Matrix6<f64>;

/// Rotation angles at or beyond this are rejected by the inverse Jacobians.
pub const JACOBIAN_SINGULAR_ANGLE: f64 = 2.0 * std::f64::consts::PI;

thread_local! {
    static EXP_CALLS: Cell<u64> = const { Cell::new(0) };
    static LOG_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Per-thread count of SE(3) exponentials and logarithms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub exp: u64,
    pub log: u64,
}

pub fn op_counts() -> OpCounts {
    OpCounts {
        exp: EXP_CALLS.with(Cell::get),
        log: LOG_CALLS.with(Cell::get),
    }
}

pub fn reset_op_counts() {
    EXP_CALLS.with(|c| c.set(0));
    LOG_CALLS.with(|c| c.set(0));
}

#[inline]
pub(crate) fn count_exp() {
    EXP_CALLS.with(|c| c.set(c.get() + 1));
}

#[inline]
pub(crate) fn count_log() {
    LOG_CALLS.with(|c| c.set(c.get() + 1));
}
