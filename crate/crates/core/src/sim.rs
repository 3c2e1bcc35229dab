//! Ground truth trajectories, noisy measurements and error metrics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::filters::NoiseParams;
use crate::kinematics::rkmk4_step;
use crate::lie::{so3, Pose, Vec3, Velocity};
use crate::stats::draw;
use crate::{Error, Result};

/// Substep of the reference integrator, seconds.
pub const REFERENCE_STEP: f64 = 1e-4;

/// Body-frame velocity as a function of time.
pub trait VelocityProfile {
    fn velocity(&self, t: f64) -> Velocity;
}

impl<F: Fn(f64) -> Velocity> VelocityProfile for F {
    fn velocity(&self, t: f64) -> Velocity {
        self(t)
    }
}

/// Planar spiral: `ω = (0, 0, 2t/(t²/1000 + 8t + 1))`, `v = (t/(1 + 2t), 0, 0)`.
pub fn spiral_velocity(t: f64) -> Velocity {
    let wz = 2.0 * t / (t * t / 1000.0 + 8.0 * t + 1.0);
    let vx = t / (1.0 + 2.0 * t);
    Velocity::new(Vec3::new(0.0, 0.0, wz), Vec3::new(vx, 0.0, 0.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub pose: Pose,
    pub velocity: Velocity,
}

/// `t_k = k / rate` for `t_k ≤ duration`. Empty when `duration` is zero.
pub fn uniform_grid(duration: f64, rate: f64) -> Vec<f64> {
    if !(duration > 0.0) || !(rate > 0.0) {
        return Vec::new();
    }
    let n = (duration * rate * (1.0 + 1e-12)).floor() as usize;
    (0..=n).map(|k| k as f64 / rate).collect()
}

/// Integrates `Ṫ = T[V]^∧` from the identity with RKMK4 at [`REFERENCE_STEP`].
pub fn ground_truth<P: VelocityProfile>(
    profile: &P,
    grid: &[f64],
) -> Result<Vec<TrajectorySample>> {
    ground_truth_from(profile, grid, Pose::identity(), REFERENCE_STEP)
}

/// As [`ground_truth`] with an explicit start pose and substep bound.
///
/// Each grid interval is split into the fewest equal substeps no longer than `h_ref`.
pub fn ground_truth_from<P: VelocityProfile>(
    profile: &P,
    grid: &[f64],
    start: Pose,
    h_ref: f64,
) -> Result<Vec<TrajectorySample>> {
    if !(h_ref > 0.0) {
        return Err(Error::InvalidInput(format!(
            "reference step must be positive, got {h_ref}"
        )));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidInput(
            "time grid must be finite and strictly increasing".into(),
        ));
    }
    let mut out = Vec::with_capacity(grid.len());
    let Some(&t0) = grid.first() else {
        return Ok(out);
    };
    let v = |t: f64| profile.velocity(t);
    let mut pose = start;
    out.push(TrajectorySample {
        t: t0,
        pose,
        velocity: v(t0),
    });
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let n = ((b - a) / h_ref * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let h = (b - a) / n as f64;
        for i in 0..n {
            pose = rkmk4_step(&pose, a + i as f64 * h, h, v)?;
        }
        out.push(TrajectorySample {
            t: b,
            pose,
            velocity: v(b),
        });
    }
    Ok(out)
}

/// Sample rates and seed of the synthetic sensors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementStream {
    /// Hz
    pub velocity_rate: f64,
    /// Hz
    pub pose_rate: f64,
    pub seed: u64,
}

impl Default for MeasurementStream {
    fn default() -> Self {
        Self {
            velocity_rate: 100.0,
            pose_rate: 1.0,
            seed: 0,
        }
    }
}

impl MeasurementStream {
    /// Velocity samples per pose measurement.
    pub fn ratio(&self) -> Result<usize> {
        if !(self.velocity_rate > 0.0 && self.pose_rate > 0.0) {
            return Err(Error::InvalidInput("rates must be positive".into()));
        }
        let r = self.velocity_rate / self.pose_rate;
        let n = r.round();
        if n < 1.0 || (r - n).abs() > 1e-9 * r {
            return Err(Error::InvalidInput(format!(
                "velocity rate {} Hz is not an integer multiple of pose rate {} Hz",
                self.velocity_rate, self.pose_rate
            )));
        }
        Ok(n as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VelocityMeasurement {
    pub t: f64,
    pub velocity: Velocity,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoseMeasurement {
    pub t: f64,
    /// Index of the truth sample the measurement was taken at.
    pub index: usize,
    pub pose: Pose,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Measurements {
    pub velocity: Vec<VelocityMeasurement>,
    pub pose: Vec<PoseMeasurement>,
}

const VELOCITY_STREAM: u64 = 1;
const POSE_STREAM: u64 = 2;

fn noise_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One velocity reading `V + w` per truth sample, and one pose reading
/// `T·exp(ν)` at every `ratio`-th sample after the first.
///
/// The truth is assumed to be sampled at the stream's velocity rate.
pub fn synthesize_measurements(
    truth: &[TrajectorySample],
    noise: &NoiseParams,
    stream: &MeasurementStream,
) -> Result<Measurements> {
    let ratio = stream.ratio()?;
    let mut vel_rng = noise_rng(stream.seed, VELOCITY_STREAM);
    let mut pose_rng = noise_rng(stream.seed, POSE_STREAM);
    let mut out = Measurements::default();
    for (k, s) in truth.iter().enumerate() {
        let w = draw(&noise.process, &mut vel_rng)?;
        out.velocity.push(VelocityMeasurement {
            t: s.t,
            velocity: Velocity(s.velocity.0 + w.0),
        });
        if k > 0 && k % ratio == 0 {
            let nu = draw(&noise.measurement, &mut pose_rng)?;
            out.pose.push(PoseMeasurement {
                t: s.t,
                index: k,
                pose: s.pose.retract(&nu),
            });
        }
    }
    Ok(out)
}

/// `(‖log(R_estᵀ R_true)‖, ‖r_est − r_true‖)`
pub fn error_metrics(est: &Pose, truth: &Pose) -> Result<(f64, f64)> {
    let rel = est.rotation.transpose() * truth.rotation;
    let theta = so3::log(&rel)?.norm();
    Ok((theta, (est.translation - truth.translation).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{Mat6, Rotation, Twist, Vec6};
    use rand::Rng;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn velocity_profile_values() {
        assert_eq!(spiral_velocity(0.0), Velocity::zero());
        let v = spiral_velocity(1.0);
        assert!((v.omega().z - 2.0 / 9.001).abs() < 1e-15);
        assert!((v.v().x - 1.0 / 3.0).abs() < 1e-15);
        assert!((spiral_velocity(1e9).v().x - 0.5).abs() < 1e-9);
    }

    #[test]
    fn grids() {
        assert!(uniform_grid(0.0, 100.0).is_empty());
        let g = uniform_grid(40.0, 100.0);
        assert_eq!(g.len(), 4001);
        assert_eq!(g[4000], 40.0);
        assert_eq!(uniform_grid(0.5, 1.0), vec![0.0]);
    }

    #[test]
    fn constant_velocity_truth() {
        let v = Velocity::new(Vec3::new(0.3, -0.2, 0.5), Vec3::new(1.0, 0.0, -0.5));
        let grid = uniform_grid(2.0, 10.0);
        let truth = ground_truth(&|_: f64| v, &grid).unwrap();
        for s in &truth {
            let want = Pose::exp(&v.integrate(s.t));
            assert!((s.pose.to_matrix() - want.to_matrix()).amax() < 1e-10);
        }
    }

    #[test]
    fn straight_line_matches_quadrature() {
        let profile =
            |t: f64| Velocity::new(Vec3::zeros(), Vec3::new(t / (1.0 + 2.0 * t), 0.0, 0.0));
        let grid = uniform_grid(10.0, 10.0);
        let truth = ground_truth(&profile, &grid).unwrap();
        for s in &truth {
            let x = s.t / 2.0 - (1.0 + 2.0 * s.t).ln() / 4.0;
            assert!((s.pose.translation.x - x).abs() < 1e-10, "t={}", s.t);
        }
    }

    #[test]
    fn spiral_stays_planar_and_self_converges() {
        let grid = uniform_grid(40.0, 1.0);
        let truth = ground_truth(&spiral_velocity, &grid).unwrap();
        let finer = ground_truth_from(
            &spiral_velocity,
            &grid,
            Pose::identity(),
            REFERENCE_STEP / 2.0,
        )
        .unwrap();
        for (a, b) in truth.iter().zip(&finer) {
            assert!(a.pose.translation.z.abs() < 1e-9);
            let r = a.pose.rotation.matrix();
            assert!(
                r[(2, 0)].abs() < 1e-9 && r[(2, 1)].abs() < 1e-9 && (r[(2, 2)] - 1.0).abs() < 1e-9
            );
            assert!((a.pose.to_matrix() - b.pose.to_matrix()).amax() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_grid_and_rates() {
        assert!(ground_truth(&spiral_velocity, &[0.0, 0.0]).is_err());
        let s = MeasurementStream {
            velocity_rate: 100.0,
            pose_rate: 3.0,
            seed: 0,
        };
        assert!(s.ratio().is_err());
        assert_eq!(MeasurementStream::default().ratio().unwrap(), 100);
    }

    #[test]
    fn noiseless_measurements_are_exact() {
        let truth = ground_truth(&spiral_velocity, &uniform_grid(3.0, 100.0)).unwrap();
        let m =
            synthesize_measurements(&truth, &NoiseParams::zero(), &MeasurementStream::default())
                .unwrap();
        assert_eq!(m.velocity.len(), truth.len());
        assert_eq!(
            m.pose.iter().map(|p| p.t).collect::<Vec<_>>(),
            vec![1.0, 2.0, 3.0]
        );
        for (v, s) in m.velocity.iter().zip(&truth) {
            assert_eq!(v.velocity, s.velocity);
        }
        for p in &m.pose {
            assert_eq!(p.pose, truth[p.index].pose);
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let truth = ground_truth(&spiral_velocity, &uniform_grid(2.0, 100.0)).unwrap();
        let noise = NoiseParams::isotropic(0.1, 0.05, 0.02, 0.01);
        let s = MeasurementStream {
            seed: 42,
            ..Default::default()
        };
        let a = synthesize_measurements(&truth, &noise, &s).unwrap();
        assert_eq!(a, synthesize_measurements(&truth, &noise, &s).unwrap());
        let other = synthesize_measurements(&truth, &noise, &MeasurementStream::default()).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn pose_noise_covariance() {
        let sample = TrajectorySample {
            t: 0.0,
            pose: Pose::exp(&Twist(Vec6::new(0.1, 0.2, 0.3, 1.0, 2.0, 3.0))),
            velocity: Velocity::zero(),
        };
        let truth = vec![sample; 100_001];
        let noise = NoiseParams::isotropic(0.0, 0.0, std::f64::consts::PI / 180.0, 0.01);
        let stream = MeasurementStream {
            velocity_rate: 1.0,
            pose_rate: 1.0,
            seed: 3,
        };
        let m = synthesize_measurements(&truth, &noise, &stream).unwrap();
        assert_eq!(m.pose.len(), 100_000);
        let mut cov = Mat6::zeros();
        for p in &m.pose {
            let e = sample.pose.between(&p.pose).unwrap().0;
            cov += e * e.transpose() / m.pose.len() as f64;
        }
        for i in 0..6 {
            let want = noise.measurement[(i, i)];
            assert!((cov[(i, i)] / want - 1.0).abs() < 0.05, "{i}");
        }
    }

    #[test]
    fn error_metric_cases() {
        let truth = Pose::exp(&Twist(Vec6::new(0.3, -0.1, 0.9, 2.0, 1.0, 0.0)));
        assert_eq!(error_metrics(&truth, &truth).unwrap(), (0.0, 0.0));

        let offset = Pose::new(
            Rotation::exp(&Vec3::new(0.0, -FRAC_PI_4, 0.0)),
            Vec3::new(0.0, 0.5, 0.0),
        );
        let (th, r) = error_metrics(&offset, &Pose::identity()).unwrap();
        assert!((th - FRAC_PI_4).abs() < 1e-15);
        assert!((r - 0.5).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut tw = || Twist(Vec6::from_fn(|_, _| rng.random_range(-1.0..1.0)));
        for _ in 0..50 {
            let (a, b, c) = (Pose::exp(&tw()), Pose::exp(&tw()), Pose::exp(&tw()));
            let left = Pose::new(c.rotation, Vec3::zeros());
            let (t1, _) = error_metrics(&a, &b).unwrap();
            let (t2, _) = error_metrics(&(left * a), &(left * b)).unwrap();
            assert!((t1 - t2).abs() < 1e-12);
            assert!(t1 >= 0.0);
        }
    }
}
