//! Discretizations of `Ṫ = T[V]^∧`.
//!
//! On the algebra, `T = exp(u)` obeys `u̇ = Φ_r⁻¹(u)V`. On the group the same
//! motion is stepped with `T ← T·exp(hV)`.

use crate::lie::{se3, Pose, Twist, Velocity};
use crate::Result;

/// Explicit Euler on the logarithm, `u + h Φ_r⁻¹(u) V`.
pub fn euler_log_step(u: &Twist, v: &Velocity, h: f64) -> Result<Twist> {
    Ok(Twist(u.0 + se3::apply_jac_r_inv(u, &v.0)? * h))
}

/// Explicit Euler on the group, `X·exp(hV)`.
pub fn euler_group_step(x: &Pose, v: &Velocity, h: f64) -> Pose {
    x.retract(&v.integrate(h))
}

/// One Runge–Kutta–Munthe-Kaas step of order four from `t` to `t + h`.
pub fn rkmk4_step<F>(x: &Pose, t: f64, h: f64, velocity: F) -> Result<Pose>
where
    F: Fn(f64) -> Velocity,
{
    let f = |u: Twist, s: f64| -> Result<Twist> {
        Ok(Twist(se3::apply_jac_r_inv(&u, &velocity(s).0)?))
    };
    let k1 = f(Twist::zero(), t)?;
    let k2 = f(k1 * (0.5 * h), t + 0.5 * h)?;
    let k3 = f(k2 * (0.5 * h), t + 0.5 * h)?;
    let k4 = f(k3 * h, t + h)?;
    let u = (k1 + (k2 + k3) * 2.0 + k4) * (h / 6.0);
    Ok(x.retract(&u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{Vec3, Vec6};

    fn rotating(t: f64) -> Velocity {
        Velocity::new(
            Vec3::new(0.3 * t.cos(), 0.2, -0.5 * t),
            Vec3::new(1.0, t, 0.1),
        )
    }

    #[test]
    fn euler_steps_agree_from_identity() {
        let v = rotating(0.4);
        let a = se3::exp(&euler_log_step(&Twist::zero(), &v, 0.01).unwrap());
        let b = euler_group_step(&Pose::identity(), &v, 0.01);
        assert!((a.to_matrix() - b.to_matrix()).amax() < 1e-15);
    }

    #[test]
    fn euler_discrepancy_is_second_order() {
        let u = Twist(Vec6::new(0.4, -0.3, 0.9, 1.0, -2.0, 0.5));
        let v = rotating(1.0);
        let gap = |h: f64| {
            let alg = euler_log_step(&u, &v, h).unwrap();
            let grp = euler_group_step(&se3::exp(&u), &v, h);
            (se3::log(&grp).unwrap() - alg).norm()
        };
        let ratio = gap(0.01) / gap(0.005);
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn rkmk4_constant_velocity_is_exact() {
        let v = Velocity::new(Vec3::new(0.1, -0.7, 0.3), Vec3::new(0.5, 0.0, 2.0));
        let x0 = se3::exp(&Twist(Vec6::new(0.2, 0.1, 0.0, 1.0, 1.0, 1.0)));
        let mut x = x0;
        for k in 0..100 {
            x = rkmk4_step(&x, k as f64 * 0.01, 0.01, |_| v).unwrap();
        }
        let want = x0.retract(&v.integrate(1.0));
        assert!((x.to_matrix() - want.to_matrix()).amax() < 1e-12);
    }

    #[test]
    fn rkmk4_is_fourth_order() {
        let run = |n: usize| {
            let h = 1.0 / n as f64;
            let mut x = Pose::identity();
            for k in 0..n {
                x = rkmk4_step(&x, k as f64 * h, h, rotating).unwrap();
            }
            x
        };
        let fine = run(1600);
        let e1 = run(20).between(&fine).unwrap().norm();
        let e2 = run(40).between(&fine).unwrap().norm();
        let ratio = e1 / e2;
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }
}
