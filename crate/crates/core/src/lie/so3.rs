//! SO(3): hat/vee, exponential, logarithm and the right/left Jacobians.

use super::coeffs::{INV_JAC_QUADRATIC, ONE_MINUS_COS, SINC, THETA_MINUS_SIN, THETA_OVER_SIN};
use super::{Mat3, Rotation, Vec3, JACOBIAN_SINGULAR_ANGLE};
use crate::{Error, Result};

/// Smallest admissible `trace(R) + 1` for the logarithm.
pub const LOG_TRACE_MARGIN: f64 = 1e-9;

/// Skew-symmetric matrix `ŵ` with `ŵu = w × u`.
#[inline]
pub fn hat(w: &Vec3) -> Mat3 {
    Mat3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Inverse of [`hat`], reading the skew-symmetric part of `m`.
#[inline]
pub fn vee(m: &Mat3) -> Vec3 {
    Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// `exp θ̂ = I + (sin θ/θ) θ̂ + ((1 − cos θ)/θ²) θ̂²`
pub fn exp(theta: &Vec3) -> Rotation {
    let t = theta.norm();
    let k = hat(theta);
    Rotation::from_matrix_unchecked(
        Mat3::identity() + k * SINC.eval(t) + k * k * ONE_MINUS_COS.eval(t),
    )
}

/// Rotation vector of `r`, with `‖θ‖ ∈ [0, π)`.
///
/// The angle comes from `atan2(‖vee(R − Rᵀ)‖/2, (tr R − 1)/2)`, so the result is
/// valid on the whole open ball rather than only for `θ < π/2`. Past `π/2` the
/// axis is read from the symmetric part `(R + Rᵀ)/2 − cos θ I = (1 − cos θ) nnᵀ`,
/// which stays well conditioned as `sin θ → 0`.
pub fn log(r: &Rotation) -> Result<Vec3> {
    let m = r.matrix();
    let trace = m.trace();
    if trace <= -1.0 + LOG_TRACE_MARGIN {
        return Err(Error::AngleNearPi { trace });
    }
    let cos = (0.5 * (trace - 1.0)).clamp(-1.0, 1.0);
    // sin θ · n
    let w = Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    );
    let sin = w.norm();
    let angle = sin.atan2(cos);
    if cos > 0.0 {
        return Ok(w * THETA_OVER_SIN.eval(angle));
    }

    let sym = (m + m.transpose()) * 0.5 - Mat3::identity() * cos;
    let j = (0..3)
        .max_by(|&a, &b| sym[(a, a)].total_cmp(&sym[(b, b)]))
        .unwrap_or(0);
    let mut axis: Vec3 = sym.column(j).into();
    axis /= axis.norm();
    if axis.dot(&w) < 0.0 {
        axis = -axis;
    }
    Ok(axis * angle)
}

/// Right Jacobian `Ψ_r(θ̂) = I − ((1 − cos θ)/θ²) θ̂ + ((θ − sin θ)/θ³) θ̂²`.
pub fn jac_r(theta: &Vec3) -> Mat3 {
    let t = theta.norm();
    let k = hat(theta);
    Mat3::identity() - k * ONE_MINUS_COS.eval(t) + k * k * THETA_MINUS_SIN.eval(t)
}

/// Left Jacobian, `Ψ_l(θ̂) = Ψ_r(−θ̂)`.
pub fn jac_l(theta: &Vec3) -> Mat3 {
    jac_r(&-theta)
}

/// `Ψ_r⁻¹(θ̂) = I + ½θ̂ + ((1 − (θ/2) cot(θ/2))/θ²) θ̂²`, defined for `θ < 2π`.
pub fn jac_r_inv(theta: &Vec3) -> Result<Mat3> {
    let t = theta.norm();
    check_invertible(t)?;
    let k = hat(theta);
    Ok(Mat3::identity() + k * 0.5 + k * k * INV_JAC_QUADRATIC.eval(t))
}

/// `Ψ_l⁻¹(θ̂) = Ψ_r⁻¹(−θ̂)`.
pub fn jac_l_inv(theta: &Vec3) -> Result<Mat3> {
    jac_r_inv(&-theta)
}

#[inline]
pub(crate) fn check_invertible(angle: f64) -> Result<()> {
    if angle < JACOBIAN_SINGULAR_ANGLE {
        Ok(())
    } else {
        Err(Error::JacobianSingular {
            angle,
            limit: JACOBIAN_SINGULAR_ANGLE,
        })
    }
}
