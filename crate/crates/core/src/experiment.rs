//! Case-study runs and the timing benchmark.

use std::time::{Duration, Instant};

use crate::filters::{FilterKind, FilterState, NoiseParams, Ukf, UkfParams};
use crate::lie::{Mat6, Pose, Rotation, Vec3};
use crate::sim::{
    error_metrics, ground_truth, spiral_velocity, synthesize_measurements, uniform_grid,
    MeasurementStream, Measurements, TrajectorySample,
};
use crate::{Error, Result};

/// Initial estimate of a case study.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Case {
    /// 45° about `y` and 0.5 m along `y` away from the true start.
    #[default]
    Offset,
    /// Estimate starts at the true pose.
    Zero,
}

impl Case {
    pub fn initial_pose(&self) -> Pose {
        match self {
            Self::Offset => Pose::new(
                Rotation::exp(&Vec3::new(0.0, -std::f64::consts::FRAC_PI_4, 0.0)),
                Vec3::new(0.0, 0.5, 0.0),
            ),
            Self::Zero => Pose::identity(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Offset => "offset",
            Self::Zero => "zero",
        }
    }
}

impl std::str::FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "offset" => Ok(Self::Offset),
            "zero" => Ok(Self::Zero),
            _ => Err(Error::InvalidInput(format!("unknown case `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Seconds.
    pub duration: f64,
    pub velocity_rate: f64,
    pub pose_rate: f64,
    pub sigma_omega: f64,
    pub sigma_v: f64,
    pub sigma_r: f64,
    pub sigma_p: f64,
    /// Initial covariance is `p0 · I₆`.
    pub p0: f64,
    pub case: Case,
    pub seed: u64,
    pub params: UkfParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            duration: 40.0,
            velocity_rate: 100.0,
            pose_rate: 1.0,
            sigma_omega: 0.1,
            sigma_v: 0.05,
            sigma_r: std::f64::consts::PI / 180.0,
            sigma_p: 0.01,
            p0: 0.01,
            case: Case::Offset,
            seed: 0,
            params: UkfParams::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let sigmas = [
            self.sigma_omega,
            self.sigma_v,
            self.sigma_r,
            self.sigma_p,
            self.p0,
        ];
        if sigmas.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(Error::InvalidInput(
                "noise levels and p0 must be finite and non-negative".into(),
            ));
        }
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "invalid duration {}",
                self.duration
            )));
        }
        UkfParams::new(self.params.alpha, self.params.beta)?;
        self.stream().ratio()?;
        Ok(())
    }

    pub fn noise(&self) -> NoiseParams {
        NoiseParams::isotropic(self.sigma_omega, self.sigma_v, self.sigma_r, self.sigma_p)
    }

    pub fn stream(&self) -> MeasurementStream {
        MeasurementStream {
            velocity_rate: self.velocity_rate,
            pose_rate: self.pose_rate,
            seed: self.seed,
        }
    }

    pub fn initial_state(&self) -> FilterState {
        FilterState::new(self.case.initial_pose(), Mat6::identity() * self.p0)
    }
}

/// Truth and measurements shared by every filter of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub truth: Vec<TrajectorySample>,
    pub measurements: Measurements,
}

/// Spiral trajectory sampled at the velocity rate, plus noisy readings.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Scenario> {
    cfg.validate()?;
    let grid = uniform_grid(cfg.duration, cfg.velocity_rate);
    let truth = ground_truth(&spiral_velocity, &grid)?;
    let measurements = synthesize_measurements(&truth, &cfg.noise(), &cfg.stream())?;
    Ok(Scenario {
        truth,
        measurements,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorRecord {
    pub t: f64,
    pub pose: Pose,
    pub theta_e: f64,
    pub r_e: f64,
    pub trace_p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterRun {
    pub kind: FilterKind,
    pub records: Vec<ErrorRecord>,
    /// Time and cause of an aborted run.
    pub failure: Option<(f64, Error)>,
}

/// Runs one filter over a scenario.
///
/// At every truth sample the pose measurement (if any) is applied first, the
/// estimate is recorded, and then the velocity reading is integrated up to
/// the next sample.
pub fn run_filter(kind: FilterKind, cfg: &ExperimentConfig, scenario: &Scenario) -> FilterRun {
    let mut ukf = Ukf::new(kind, cfg.params, cfg.noise(), cfg.initial_state());
    let mut records = Vec::with_capacity(scenario.truth.len());
    let mut failure = None;
    let mut poses = scenario.measurements.pose.iter().peekable();
    for (k, s) in scenario.truth.iter().enumerate() {
        let step = (|| -> Result<()> {
            if let Some(z) = poses.next_if(|z| z.index == k) {
                ukf.correct(&z.pose)?;
            }
            let (theta_e, r_e) = error_metrics(&ukf.state.pose, &s.pose)?;
            records.push(ErrorRecord {
                t: s.t,
                pose: ukf.state.pose,
                theta_e,
                r_e,
                trace_p: ukf.state.cov.trace(),
            });
            if let Some(next) = scenario.truth.get(k + 1) {
                ukf.predict(&scenario.measurements.velocity[k].velocity, next.t - s.t)?;
            }
            Ok(())
        })();
        if let Err(e) = step {
            failure = Some((s.t, e));
            break;
        }
    }
    FilterRun {
        kind,
        records,
        failure,
    }
}

/// Mean and maximum errors over a time window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorSummary {
    pub samples: usize,
    pub mean_theta_e: f64,
    pub max_theta_e: f64,
    pub mean_r_e: f64,
    pub max_r_e: f64,
}

/// Summary over records with `t ∈ [from, to]`; `None` if there are none.
pub fn summarize(records: &[ErrorRecord], from: f64, to: f64) -> Option<ErrorSummary> {
    let window: Vec<&ErrorRecord> = records
        .iter()
        .filter(|r| r.t >= from && r.t <= to)
        .collect();
    if window.is_empty() {
        return None;
    }
    let n = window.len() as f64;
    Some(ErrorSummary {
        samples: window.len(),
        mean_theta_e: window.iter().map(|r| r.theta_e).sum::<f64>() / n,
        max_theta_e: window.iter().map(|r| r.theta_e).fold(0.0, f64::max),
        mean_r_e: window.iter().map(|r| r.r_e).sum::<f64>() / n,
        max_r_e: window.iter().map(|r| r.r_e).fold(0.0, f64::max),
    })
}

/// Wall time of the filter calls alone over a scenario.
pub fn time_filter(
    kind: FilterKind,
    cfg: &ExperimentConfig,
    scenario: &Scenario,
) -> Result<Duration> {
    let mut ukf = Ukf::new(kind, cfg.params, cfg.noise(), cfg.initial_state());
    let truth = &scenario.truth;
    let mut poses = scenario.measurements.pose.iter().peekable();
    let start = Instant::now();
    for k in 0..truth.len() {
        if let Some(z) = poses.next_if(|z| z.index == k) {
            ukf.correct(&z.pose)?;
        }
        if k + 1 < truth.len() {
            ukf.predict(
                &scenario.measurements.velocity[k].velocity,
                truth[k + 1].t - truth[k].t,
            )?;
        }
    }
    let elapsed = start.elapsed();
    std::hint::black_box(&ukf.state);
    Ok(elapsed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchEntry {
    pub kind: FilterKind,
    /// Seconds per measurement set, one entry per timed set.
    pub times: Vec<f64>,
}

impl BenchEntry {
    pub fn mean(&self) -> f64 {
        self.times.iter().sum::<f64>() / self.times.len().max(1) as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub sets: usize,
    pub samples: usize,
    pub entries: Vec<BenchEntry>,
}

impl BenchReport {
    /// `mean(kind) / mean(UKF-LG)`.
    pub fn ratio(&self, kind: FilterKind) -> Option<f64> {
        let mean = |k: FilterKind| {
            self.entries
                .iter()
                .find(|e| e.kind == k)
                .map(BenchEntry::mean)
        };
        Some(mean(kind)? / mean(FilterKind::Lg)?)
    }
}

/// Times every filter over `sets` measurement sets of `samples` velocity
/// readings each (one time update per reading, pose updates at the pose rate).
///
/// Set `i` uses seed `cfg.seed + i`; one extra warm-up set is run first and
/// discarded. Sets are timed one after another on the calling thread.
pub fn bench(cfg: &ExperimentConfig, sets: usize, samples: usize) -> Result<BenchReport> {
    if sets == 0 || samples == 0 {
        return Err(Error::InvalidInput(
            "bench needs at least one set and one sample".into(),
        ));
    }
    let mut entries: Vec<BenchEntry> = FilterKind::ALL
        .iter()
        .map(|&kind| BenchEntry {
            kind,
            times: Vec::with_capacity(sets),
        })
        .collect();
    for set in 0..=sets {
        let set_cfg = ExperimentConfig {
            duration: samples as f64 / cfg.velocity_rate,
            seed: cfg.seed.wrapping_add(set as u64),
            ..*cfg
        };
        let scenario = simulate(&set_cfg)?;
        for entry in entries.iter_mut() {
            let t = time_filter(entry.kind, &set_cfg, &scenario)?;
            if set > 0 {
                entry.times.push(t.as_secs_f64());
            }
        }
    }
    Ok(BenchReport {
        sets,
        samples,
        entries,
    })
}
