//! SE(3): exponential, logarithm, adjoint and the right/left Jacobians.
//!
//! The inverse right Jacobian has the block form
//!
//! ```text
//! Φ_r⁻¹(ad ξ) = [[Ψ_r⁻¹, 0], [C_r, Ψ_r⁻¹]]
//! C_r = ½ρ̂ + ((1 − α(θ))/θ²)(θ̂ρ̂ + ρ̂θ̂) + ((α(θ) + β(θ) − 2)/θ⁴)(θᵀρ) θ̂²
//! ```
//!
//! with `α(y) = (y/2)cot(y/2)` and `β(y) = (y/2)²/sin²(y/2)`, so it costs no
//! more than a handful of 3×3 products and no matrix inversion.

use super::coeffs::{INV_JAC_QUADRATIC, INV_JAC_QUARTIC, Q_QUARTIC, Q_QUINTIC, THETA_MINUS_SIN};
use super::{count_exp, count_log, so3, Mat3, Mat4, Mat6, Pose, Twist, Vec3, Vec6};
use crate::Result;

/// `[ξ]^∧ = [[θ̂, ρ], [0ᵀ, 0]]`
pub fn hat(xi: &Twist) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<3, 3>(0, 0)
        .copy_from(&so3::hat(&xi.theta()));
    m.fixed_view_mut::<3, 1>(0, 3).copy_from(&xi.rho());
    m
}

pub fn vee(m: &Mat4) -> Twist {
    let theta = so3::vee(&m.fixed_view::<3, 3>(0, 0).into_owned());
    Twist::new(theta, m.fixed_view::<3, 1>(0, 3).into_owned())
}

/// `exp [ξ]^∧ = [[exp θ̂, Ψ_l(θ̂)ρ], [0ᵀ, 1]]`
pub fn exp(xi: &Twist) -> Pose {
    count_exp();
    let theta = xi.theta();
    Pose::new(so3::exp(&theta), so3::jac_l(&theta) * xi.rho())
}

/// `θ = log R`, `ρ = Ψ_l⁻¹(θ̂) r`. Fails with `AngleNearPi` at the cut locus.
pub fn log(t: &Pose) -> Result<Twist> {
    count_log();
    let theta = so3::log(&t.rotation)?;
    let rho = so3::jac_l_inv(&theta)? * t.translation;
    Ok(Twist::new(theta, rho))
}

/// Matrix form of the adjoint map, `ad(ξ) = [[θ̂, 0], [ρ̂, θ̂]]`.
pub fn adjoint(xi: &Twist) -> Mat6 {
    let th = so3::hat(&xi.theta());
    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&th);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&th);
    m.fixed_view_mut::<3, 3>(3, 0)
        .copy_from(&so3::hat(&xi.rho()));
    m
}

/// Closed form of the coupling block `Q` (the lower-left block of the left
/// Jacobian). The right Jacobian carries `Qᵀ`.
pub fn q_block(xi: &Twist) -> Mat3 {
    let t = xi.angle();
    let th = so3::hat(&xi.theta());
    let rh = so3::hat(&xi.rho());
    let th_rh = th * rh;
    let rh_th = rh * th;
    let th_rh_th = th_rh * th;
    let th2 = th * th;
    rh * 0.5 + (th_rh + rh_th + th_rh_th) * THETA_MINUS_SIN.eval(t)
        - (th2 * rh + rh * th2 - th_rh_th * 3.0) * Q_QUARTIC.eval(t)
        - th_rh_th * th * Q_QUINTIC.eval(t)
}

/// The lower-left block `C_r` of `Φ_r⁻¹`.
pub fn c_block(xi: &Twist) -> Mat3 {
    let t = xi.angle();
    let theta = xi.theta();
    let th = so3::hat(&theta);
    let rh = so3::hat(&xi.rho());
    rh * 0.5
        + (th * rh + rh * th) * INV_JAC_QUADRATIC.eval(t)
        + th * th * (theta.dot(&xi.rho()) * INV_JAC_QUARTIC.eval(t))
}

/// Right Jacobian `Φ_r(ad ξ) = [[Ψ_r, 0], [Qᵀ, Ψ_r]]`.
///
/// `Φ_r` is finite everywhere; it becomes singular at `θ = 2π`, which is
/// reported by [`jac_r_inv`].
pub fn jac_r(xi: &Twist) -> Mat6 {
    let psi = so3::jac_r(&xi.theta());
    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&psi);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&psi);
    m.fixed_view_mut::<3, 3>(3, 0)
        .copy_from(&q_block(xi).transpose());
    m
}

/// Inverse right Jacobian `Φ_r⁻¹(ad ξ) = [[Ψ_r⁻¹, 0], [C_r, Ψ_r⁻¹]]`.
pub fn jac_r_inv(xi: &Twist) -> Result<Mat6> {
    let psi_inv = so3::jac_r_inv(&xi.theta())?;
    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&psi_inv);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&psi_inv);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&c_block(xi));
    Ok(m)
}

/// `Φ_l(ad ξ) = Φ_r(−ad ξ)`
pub fn jac_l(xi: &Twist) -> Mat6 {
    jac_r(&-*xi)
}

/// `Φ_l⁻¹(ad ξ) = Φ_r⁻¹(−ad ξ)`; its `C_l` differs from `C_r` only in the sign of `½ρ̂`.
pub fn jac_l_inv(xi: &Twist) -> Result<Mat6> {
    jac_r_inv(&-*xi)
}

/// `Φ_r⁻¹(ad ξ) v` without forming the 6×6 matrix.
///
/// Expands every block into cross products:
/// `Ψ_r⁻¹ω = ω + ½θ×ω + q θ×(θ×ω)` and
/// `C_r ω = ½ρ×ω + q(θ×(ρ×ω) + ρ×(θ×ω)) + g(θᵀρ) θ×(θ×ω)`.
pub fn apply_jac_r_inv(xi: &Twist, v: &Vec6) -> Result<Vec6> {
    let t = xi.angle();
    so3::check_invertible(t)?;
    let q = INV_JAC_QUADRATIC.eval(t);
    let g = INV_JAC_QUARTIC.eval(t);
    let theta = xi.theta();
    let rho = xi.rho();
    let omega: Vec3 = v.fixed_rows::<3>(0).into_owned();
    let lin: Vec3 = v.fixed_rows::<3>(3).into_owned();

    let psi_inv =
        |u: &Vec3| -> Vec3 { u + theta.cross(u) * 0.5 + theta.cross(&theta.cross(u)) * q };
    let th_om = theta.cross(&omega);
    let c_omega = rho.cross(&omega) * 0.5
        + (theta.cross(&rho.cross(&omega)) + rho.cross(&th_om)) * q
        + theta.cross(&th_om) * (theta.dot(&rho) * g);

    let top = psi_inv(&omega);
    let bottom = c_omega + psi_inv(&lin);
    Ok(Vec6::new(top.x, top.y, top.z, bottom.x, bottom.y, bottom.z))
}

/// First-order BCH: `log(exp(a) exp(b)) ≈ a + Φ_r⁻¹(ad a) b`.
pub fn bch_compose(a: &Twist, b: &Twist) -> Result<Twist> {
    Ok(*a + Twist(apply_jac_r_inv(a, &b.0)?))
}

/// First-order BCH split: `exp(a + d) ≈ exp(a) exp(e)` with `e = Φ_r(ad a) d`.
pub fn bch_split(a: &Twist, d: &Twist) -> Twist {
    Twist(jac_r(a) * d.0)
}
