//! Time updates.

use super::{check_divergence, make_sigma_points, FilterState, NoiseParams, SigmaSet, UkfParams};
use crate::lie::{se3, Pose, Twist, Vec6, Velocity};
use crate::linalg::block_diag;
use crate::stats::{scatter, transport, weighted_karcher_mean_of_twists, weighted_sum};
use crate::{Error, Result};

fn check_step(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "time step must be positive, got {h}"
        )))
    }
}

fn time_sigma(state: &FilterState, noise: &NoiseParams, params: &UkfParams) -> Result<SigmaSet> {
    let p_aug = block_diag::<6, 6, 12>(&state.cov, &noise.process);
    let sigma = make_sigma_points(&p_aug, params)?;
    check_divergence(&sigma.points)?;
    Ok(sigma)
}

fn split(p: &super::Vec12) -> (Twist, Vec6) {
    (
        Twist(p.fixed_rows::<6>(0).into_owned()),
        p.fixed_rows::<6>(6).into_owned(),
    )
}

/// `ξ′ = ξˣ + h Φ_r⁻¹(ξˣ)(V + ξʷ)` for every sigma point.
fn propagate_on_algebra(sigma: &SigmaSet, v: &Velocity, h: f64) -> Result<Vec<Twist>> {
    sigma
        .points
        .iter()
        .map(|p| {
            let (x, w) = split(p);
            Ok(Twist(x.0 + se3::apply_jac_r_inv(&x, &(v.0 + w))? * h))
        })
        .collect()
}

/// `T⁺ = base·exp(ξ̄)`, `P⁺ = Φ_r(ξ̄) [Σ wᴾ (ξ′ − ξ̄)(ξ′ − ξ̄)ᵀ] Φ_r(ξ̄)ᵀ`.
fn finish(base: &Pose, propagated: &[Twist], mean: Twist, sigma: &SigmaSet) -> FilterState {
    let s = scatter(propagated, &mean, &sigma.w_p());
    FilterState::new(base.retract(&mean), transport(&mean, &s))
}

/// Lie-algebra time update: sigma points follow the logarithm ODE, one Euler step.
pub fn ukf_la_time_update(
    state: &FilterState,
    noise: &NoiseParams,
    v: &Velocity,
    h: f64,
    params: &UkfParams,
) -> Result<FilterState> {
    check_step(h)?;
    let sigma = time_sigma(state, noise, params)?;
    let propagated = propagate_on_algebra(&sigma, v, h)?;
    let mean = weighted_sum(&propagated, &sigma.w_mu());
    Ok(finish(&state.pose, &propagated, mean, &sigma))
}

/// Group-propagation baseline.
///
/// Each point moves as `X = T·exp(ξˣ)·exp(h(V + ξʷ))` and is read back as
/// `ξ′ = log(T_ref⁻¹X)` about `T_ref = T·exp(hV)`.
pub fn ukf_lg_time_update(
    state: &FilterState,
    noise: &NoiseParams,
    v: &Velocity,
    h: f64,
    params: &UkfParams,
) -> Result<FilterState> {
    check_step(h)?;
    let sigma = time_sigma(state, noise, params)?;
    let inc = v.integrate(h);
    // T_ref⁻¹ T = exp(−hV)
    let back = se3::exp(&-inc);
    let propagated = sigma
        .points
        .iter()
        .map(|p| {
            let (x, w) = split(p);
            let moved = back * se3::exp(&x) * se3::exp(&Twist(inc.0 + w * h));
            se3::log(&moved)
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = weighted_sum(&propagated, &sigma.w_mu());
    let t_ref = state.pose.retract(&inc);
    Ok(finish(&t_ref, &propagated, mean, &sigma))
}

/// As [`ukf_la_time_update`], with the weighted Karcher mean of `exp(ξ′)` in
/// place of the algebra average.
pub fn ukf_la_opt_time_update(
    state: &FilterState,
    noise: &NoiseParams,
    v: &Velocity,
    h: f64,
    params: &UkfParams,
) -> Result<FilterState> {
    check_step(h)?;
    let sigma = time_sigma(state, noise, params)?;
    let propagated = propagate_on_algebra(&sigma, v, h)?;
    let karcher = weighted_karcher_mean_of_twists(&propagated, &sigma.w_mu(), params.karcher)?;
    let mean = se3::log(&karcher.mean)?;
    Ok(finish(&state.pose, &propagated, mean, &sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::FilterKind;
    use crate::lie::{op_counts, reset_op_counts, Mat6, Vec3};
    use crate::linalg::min_eigenvalue;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn start() -> Pose {
        se3::exp(&Twist(Vec6::new(0.2, -0.4, 0.7, 1.0, -0.5, 2.0)))
    }

    fn noise(p: f64) -> NoiseParams {
        NoiseParams {
            process: Mat6::identity() * p,
            measurement: Mat6::identity() * p,
        }
    }

    #[test]
    fn zero_everything_keeps_state() {
        let s = FilterState::new(start(), Mat6::zeros());
        for kind in FilterKind::ALL {
            let out = kind
                .time_update(
                    &s,
                    &NoiseParams::zero(),
                    &Velocity::zero(),
                    0.01,
                    &UkfParams::default(),
                )
                .unwrap();
            assert!(
                (out.pose.to_matrix() - s.pose.to_matrix()).amax() < 1e-15,
                "{kind}"
            );
            assert_eq!(out.cov, Mat6::zeros(), "{kind}");
        }
    }

    #[test]
    fn deterministic_limit_is_group_step() {
        let s = FilterState::new(start(), Mat6::zeros());
        let v = Velocity::new(Vec3::new(0.0, 0.0, 0.22), Vec3::new(0.33, 0.0, 0.0));
        for h in [0.01, 0.1, 1.0] {
            let want = s.pose.retract(&v.integrate(h)).to_matrix();
            for kind in FilterKind::ALL {
                let out = kind
                    .time_update(&s, &NoiseParams::zero(), &v, h, &UkfParams::default())
                    .unwrap();
                assert!((out.pose.to_matrix() - want).amax() < 1e-12, "{kind} h={h}");
            }
        }
    }

    #[test]
    fn rejects_bad_step() {
        let s = FilterState::new(start(), Mat6::zeros());
        let r = ukf_la_time_update(
            &s,
            &NoiseParams::zero(),
            &Velocity::zero(),
            0.0,
            &UkfParams::default(),
        );
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn diverged_covariance_is_reported() {
        let s = FilterState::new(start(), Mat6::identity() * 1e7);
        for kind in FilterKind::ALL {
            let r = kind.time_update(
                &s,
                &noise(1e-4),
                &Velocity::zero(),
                0.01,
                &UkfParams::default(),
            );
            assert!(matches!(r, Err(Error::JacobianSingular { .. })), "{kind}");
        }
    }

    #[test]
    fn covariance_stays_symmetric_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = Mat6::from_fn(|_, _| rng.random_range(-0.1..0.1));
        let s = FilterState::new(start(), a * a.transpose());
        let v = Velocity::from(Vec6::from_fn(|_, _| rng.random_range(-1.0..1.0)));
        for kind in FilterKind::ALL {
            let out = kind
                .time_update(&s, &noise(1e-2), &v, 0.01, &UkfParams::default())
                .unwrap();
            assert_eq!(out.cov, out.cov.transpose());
            assert!(min_eigenvalue(&out.cov) >= -1e-10, "{kind}");
            assert!(out.pose.rotation.orthonormality_error() < 1e-9);
        }
    }

    #[test]
    fn la_mean_matches_monte_carlo() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let s = FilterState::new(start(), Mat6::identity() * 1e-4);
        let nz = noise(1e-4);
        let v = Velocity::from(Vec6::from_fn(|_, _| rng.random_range(-1.0..1.0)));
        let h = 0.01;
        let out = ukf_la_time_update(&s, &nz, &v, h, &UkfParams::default()).unwrap();
        let ukf_mean = s.pose.between(&out.pose).unwrap();

        // Antithetic pairs: the odd terms cancel exactly, leaving the curvature
        // contribution that the unscented mean has to reproduce.
        let n = 100_000;
        let mut acc = Vec6::zeros();
        let mut z = || Vec6::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal) * 1e-2);
        for _ in 0..n / 2 {
            let (x, w) = (z(), z());
            for sign in [1.0, -1.0] {
                let x = Twist(x * sign);
                acc += x.0 + se3::apply_jac_r_inv(&x, &(v.0 + w * sign)).unwrap() * h;
            }
        }
        let mc = acc / n as f64;
        let gap = (ukf_mean.0 - mc).norm();
        assert!(gap < 1e-6, "gap {gap}");
    }

    #[test]
    fn lg_agrees_with_la_to_first_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let s = FilterState::new(start(), Mat6::identity() * 1e-4);
        let v = Velocity::from(Vec6::from_fn(|_, _| rng.random_range(-1.0..1.0)));
        let la = ukf_la_time_update(&s, &noise(1e-4), &v, 0.01, &UkfParams::default()).unwrap();
        let lg = ukf_lg_time_update(&s, &noise(1e-4), &v, 0.01, &UkfParams::default()).unwrap();
        assert!(la.pose.between(&lg.pose).unwrap().norm() < 1e-5);
        assert!((la.cov - lg.cov).amax() < 1e-5);
    }

    #[test]
    fn opt_agrees_with_la() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let s = FilterState::new(start(), Mat6::identity() * 1e-4);
        let v = Velocity::from(Vec6::from_fn(|_, _| rng.random_range(-1.0..1.0)));
        let la = ukf_la_time_update(&s, &noise(1e-4), &v, 0.01, &UkfParams::default()).unwrap();
        let opt =
            ukf_la_opt_time_update(&s, &noise(1e-4), &v, 0.01, &UkfParams::default()).unwrap();
        assert!(la.pose.between(&opt.pose).unwrap().norm() <= 1e-6);
    }

    #[test]
    fn group_baseline_operation_profile() {
        let s = FilterState::new(start(), Mat6::identity() * 1e-4);
        let v = Velocity::new(Vec3::new(0.0, 0.0, 0.2), Vec3::new(0.3, 0.0, 0.0));
        let points = 25;

        reset_op_counts();
        ukf_lg_time_update(&s, &noise(1e-4), &v, 0.01, &UkfParams::default()).unwrap();
        let lg = op_counts();
        assert!(lg.exp >= 2 * points && lg.log >= points, "{lg:?}");

        reset_op_counts();
        ukf_la_time_update(&s, &noise(1e-4), &v, 0.01, &UkfParams::default()).unwrap();
        let la = op_counts();
        assert_eq!((la.exp, la.log), (1, 0));
    }

    #[test]
    fn euler_error_against_varying_velocity_is_second_order() {
        use crate::kinematics::rkmk4_step;
        let profile = |t: f64| Velocity::new(Vec3::new(0.1, 0.0, 2.0 * t), Vec3::new(t, 0.5, 0.0));
        let s = FilterState::new(start(), Mat6::zeros());
        let t0 = 1.0;
        let gap = |h: f64| {
            let est = ukf_la_time_update(
                &s,
                &NoiseParams::zero(),
                &profile(t0),
                h,
                &UkfParams::default(),
            )
            .unwrap();
            let n = 200;
            let mut x = s.pose;
            for k in 0..n {
                x = rkmk4_step(&x, t0 + k as f64 * h / n as f64, h / n as f64, profile).unwrap();
            }
            est.pose.between(&x).unwrap().norm()
        };
        let ratio = gap(0.01) / gap(0.005);
        assert!((ratio - 4.0).abs() < 0.1, "ratio {ratio}");
    }
}
