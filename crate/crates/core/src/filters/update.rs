//! Full-pose measurement update.

use nalgebra::Cholesky;

use super::{check_divergence, make_sigma_points, FilterState, NoiseParams, UkfParams, ZetaMode};
use crate::lie::{se3, Mat6, Pose, Twist};
use crate::linalg::{block_diag, symmetrize};
use crate::stats::{transport, weighted_sum};
use crate::{Error, Result};

/// Update with a measurement `Z = T·exp(ν)`, `ν ~ N(0, N)`.
///
/// The cross and innovation covariances use the covariance weights `wᴾ`.
pub fn ukf_la_measurement_update(
    state: &FilterState,
    z: &Pose,
    noise: &NoiseParams,
    params: &UkfParams,
) -> Result<FilterState> {
    let p_aug = block_diag::<6, 6, 12>(&state.cov, &noise.measurement);
    let sigma = make_sigma_points(&p_aug, params)?;
    check_divergence(&sigma.points)?;

    let mut xs = Vec::with_capacity(sigma.points.len());
    let mut zetas = Vec::with_capacity(sigma.points.len());
    for p in &sigma.points {
        let x = Twist(p.fixed_rows::<6>(0).into_owned());
        let nu = Twist(p.fixed_rows::<6>(6).into_owned());
        let zeta = match params.zeta_mode {
            ZetaMode::Exact => se3::log(&(se3::exp(&x) * se3::exp(&nu)))?,
            ZetaMode::Additive => x + nu,
        };
        xs.push(x);
        zetas.push(zeta);
    }
    let zeta_mean = weighted_sum(&zetas, &sigma.w_mu());

    let mut p_xz = Mat6::zeros();
    let mut p_zz = Mat6::zeros();
    for (i, (x, zeta)) in xs.iter().zip(&zetas).enumerate() {
        let w = sigma.weights.cov(i);
        let d = zeta.0 - zeta_mean.0;
        p_xz += x.0 * d.transpose() * w;
        p_zz += d * d.transpose() * w;
    }
    let p_zz = symmetrize(&p_zz);

    // K = P_xz P_zz⁻¹, from P_zz Kᵀ = P_xzᵀ.
    let chol = Cholesky::new(p_zz).ok_or(Error::LinearSolveFailure)?;
    let gain = chol.solve(&p_xz.transpose()).transpose();

    let innovation = se3::log(&(state.pose.inverse() * *z)).map_err(|e| match e {
        Error::AngleNearPi { trace } => Error::InnovationLogFailure { trace },
        other => other,
    })?;
    let m = Twist(gain * innovation.0);
    let reduced = symmetrize(&(state.cov - gain * p_zz * gain.transpose()));
    Ok(FilterState::new(
        state.pose.retract(&m),
        transport(&m, &reduced),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{Vec3, Vec6};
    use crate::linalg::min_eigenvalue;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn start() -> Pose {
        se3::exp(&Twist(Vec6::new(-0.3, 0.1, 0.5, 2.0, 0.0, -1.0)))
    }

    fn noise(n: f64) -> NoiseParams {
        NoiseParams {
            process: Mat6::zeros(),
            measurement: Mat6::identity() * n,
        }
    }

    #[test]
    fn zero_innovation_keeps_pose() {
        let s = FilterState::new(start(), Mat6::identity() * 1e-2);
        let out =
            ukf_la_measurement_update(&s, &s.pose, &noise(1e-12), &UkfParams::default()).unwrap();
        assert!((out.pose.to_matrix() - s.pose.to_matrix()).amax() < 1e-14);
        assert!(out.cov.trace() < 1e-9);
    }

    #[test]
    fn no_prior_uncertainty_ignores_measurement() {
        let s = FilterState::new(start(), Mat6::identity() * 1e-14);
        let z = s
            .pose
            .retract(&Twist(Vec6::new(0.1, 0.0, -0.1, 0.3, 0.2, 0.1)));
        let out = ukf_la_measurement_update(&s, &z, &noise(1e-2), &UkfParams::default()).unwrap();
        assert!(s.pose.between(&out.pose).unwrap().norm() < 1e-10);
    }

    #[test]
    fn equal_uncertainty_splits_the_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for mode in [ZetaMode::Exact, ZetaMode::Additive] {
            let params = UkfParams {
                zeta_mode: mode,
                ..UkfParams::default()
            };
            for _ in 0..20 {
                let s = FilterState::new(start(), Mat6::identity() * 1e-2);
                let mut delta = Vec6::from_fn(|_, _| rng.random_range(-1.0..1.0));
                delta *= rng.random_range(0.001..0.05) / delta.norm();
                let z = s.pose.retract(&Twist(delta));
                let out = ukf_la_measurement_update(&s, &z, &noise(1e-2), &params).unwrap();
                let m = s.pose.between(&out.pose).unwrap();
                let err = (m.0 - delta * 0.5).norm() / (delta * 0.5).norm();
                assert!(err < 0.05, "{mode}: relative error {err}");
            }
        }
    }

    #[test]
    fn trace_contracts_and_stays_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = Mat6::from_fn(|_, _| rng.random_range(-0.1..0.1));
            let s = FilterState::new(start(), a * a.transpose() + Mat6::identity() * 1e-4);
            let z = s
                .pose
                .retract(&Twist(Vec6::from_fn(|_, _| rng.random_range(-0.1..0.1))));
            let out =
                ukf_la_measurement_update(&s, &z, &noise(1e-3), &UkfParams::default()).unwrap();
            let m = s.pose.between(&out.pose).unwrap();
            let j = se3::jac_r(&m);
            assert!(out.cov.trace() <= (j * s.cov * j.transpose()).trace() + 1e-10);
            assert!(min_eigenvalue(&out.cov) >= -1e-10);
            assert_eq!(out.cov, out.cov.transpose());
        }
    }

    #[test]
    fn singular_innovation_covariance() {
        let s = FilterState::new(start(), Mat6::zeros());
        let r = ukf_la_measurement_update(&s, &s.pose, &noise(0.0), &UkfParams::default());
        assert_eq!(r, Err(Error::LinearSolveFailure));
    }

    #[test]
    fn innovation_at_cut_locus() {
        let s = FilterState::new(Pose::identity(), Mat6::identity() * 1e-2);
        let z = Pose::new(
            crate::lie::Rotation::exp(&Vec3::new(0.0, std::f64::consts::PI, 0.0)),
            Vec3::zeros(),
        );
        let r = ukf_la_measurement_update(&s, &z, &noise(1e-2), &UkfParams::default());
        assert!(matches!(r, Err(Error::InnovationLogFailure { .. })));
    }
}
