//! Exit criteria for the filters and the driver.
//!
//! Each check runs one criterion at its fixed tolerance and reports the
//! measured values. The `acceptance` test target prints one line per check.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use se3_ukf::experiment::{run_filter, simulate, summarize, Case, ExperimentConfig, FilterRun};
use se3_ukf::filters::{make_sigma_points, Mat12, Vec12};
use se3_ukf::kinematics::{euler_group_step, euler_log_step};
use se3_ukf::lie::coeffs::{gamma2, INV_JAC_QUADRATIC, INV_JAC_QUARTIC};
use se3_ukf::lie::series::{series_jacobian, SeriesKind};
use se3_ukf::lie::{se3, Mat3, Mat6, Pose, Twist, Vec3, Vec6};
use se3_ukf::sim::{ground_truth, spiral_velocity};
use se3_ukf::stats::{karcher_mean, mean_on_algebra, KarcherOptions, WeightedTwistSet};
use se3_ukf::{FilterKind, UkfParams};
use se3_ukf_cli::{cmd_bench, RunConfig, REFERENCE_PERCENT};

const SERIES_TERMS: usize = 30;

pub struct Check {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn line(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        format!("[{tag}] {} {}: {}", self.id, self.name, self.detail)
    }
}

fn unit_direction(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-3 {
            return v / n;
        }
    }
}

fn twist_with_angle(rng: &mut ChaCha8Rng, angle: f64, rho_scale: f64) -> Twist {
    let rho = Vec3::from_fn(|_, _| rng.random_range(-rho_scale..rho_scale));
    Twist::new(unit_direction(rng) * angle, rho)
}

fn gaussian_twist(rng: &mut ChaCha8Rng, sigma: f64) -> Twist {
    Twist(Vec6::from_fn(|_, _| {
        sigma * rng.sample::<f64, _>(StandardNormal)
    }))
}

pub fn jacobian_closed_form() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut dev, mut inv_dev, mut c_dev) = (0f64, 0f64, 0f64);
    for _ in 0..1000 {
        let angle = rng.random_range(1e-6..3.0);
        let xi = twist_with_angle(&mut rng, angle, 1.0);
        let series = series_jacobian(&(-se3::adjoint(&xi)), SERIES_TERMS, SeriesKind::Jacobian);
        let closed = se3::jac_r(&xi);
        dev = dev.max((closed - series).amax());

        let inv = se3::jac_r_inv(&xi).expect("angle below 2π");
        inv_dev = inv_dev.max((inv * closed - Mat6::identity()).amax());

        let psi: Mat3 = series.fixed_view::<3, 3>(0, 0).into_owned();
        let qt: Mat3 = series.fixed_view::<3, 3>(3, 0).into_owned();
        let psi_inv = psi.try_inverse().expect("Ψ invertible below 2π");
        let want = -psi_inv * qt * psi_inv;
        let got: Mat3 = inv.fixed_view::<3, 3>(3, 0).into_owned();
        c_dev = c_dev.max((got - want).amax());
    }
    let secs = start.elapsed().as_secs_f64();
    Check {
        id: 1,
        name: "Jacobian closed form",
        pass: dev <= 1e-9 && inv_dev <= 1e-10 && c_dev <= 1e-10 && secs < 5.0,
        detail: format!(
            "series dev {dev:.2e} (<= 1e-9), inverse dev {inv_dev:.2e} (<= 1e-10), \
             C_r dev {c_dev:.2e} (<= 1e-10), {secs:.3} s (< 5 s)"
        ),
    }
}

pub fn taylor_limits() -> Check {
    let theta = 1e-4;
    let quadratic = INV_JAC_QUADRATIC.eval(theta);
    let quartic = INV_JAC_QUARTIC.eval(theta);
    let d2 = (quadratic - 1.0 / 12.0).abs();
    let d4 = (quartic - -1.0 / 720.0).abs();
    Check {
        id: 2,
        name: "Taylor limits at 1e-4",
        pass: d2 <= 1e-6 && d4 <= 1e-4,
        detail: format!(
            "(1-α)/θ² = {quadratic:.12} vs 1/12, dev {d2:.2e} (<= 1e-6); \
             (α+β-2)/θ⁴ = {quartic:.12} vs -1/720, dev {d4:.2e} (<= 1e-4); \
             (2-α-β)/(2θ⁴) = {:.12}",
            gamma2(theta)
        ),
    }
}

pub fn exp_log_roundtrip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0f64;
    let mut failures = 0usize;
    for _ in 0..10_000 {
        let angle = rng.random_range(0.0..PI - 0.05);
        let xi = twist_with_angle(&mut rng, angle, 5.0);
        match se3::log(&se3::exp(&xi)) {
            Ok(back) => worst = worst.max((back.0 - xi.0).norm()),
            Err(_) => failures += 1,
        }
    }
    Check {
        id: 3,
        name: "exp/log roundtrip",
        pass: failures == 0 && worst <= 1e-9,
        detail: format!("10^4 twists, worst {worst:.2e} (<= 1e-9), log failures {failures}"),
    }
}

fn one_step_gap(x: &Pose, t: f64, h: f64) -> f64 {
    let v = spiral_velocity(t);
    let u = x.log().expect("state away from the cut locus");
    let algebra = euler_log_step(&u, &v, h).expect("angle below 2π");
    let group = euler_group_step(x, &v, h);
    group
        .log()
        .expect("state away from the cut locus")
        .0
        .metric_distance(&algebra.0)
}

pub fn discretization_order() -> Check {
    let grid = [0.0, 1.0, 5.0, 10.0];
    let truth = ground_truth(&spiral_velocity, &grid).expect("valid grid");
    let mut states: Vec<(f64, Pose)> = truth.iter().skip(1).map(|s| (s.t, s.pose)).collect();
    states.push((1.0, Case::Offset.initial_pose()));
    let ratios: Vec<f64> = states
        .iter()
        .map(|(t, x)| one_step_gap(x, *t, 0.01) / one_step_gap(x, *t, 0.005))
        .collect();
    Check {
        id: 4,
        name: "algebra vs group one-step discrepancy",
        pass: ratios.iter().all(|r| (r - 4.0).abs() <= 0.5),
        detail: format!("ratios h=0.01/0.005 {ratios:.4?} (4 ± 0.5)"),
    }
}

pub fn offset_case() -> Check {
    let start = Instant::now();
    let cfg = ExperimentConfig::default();
    let scenario = simulate(&cfg).expect("valid config");
    let runs: Vec<FilterRun> = FilterKind::ALL
        .iter()
        .map(|&k| run_filter(k, &cfg, &scenario))
        .collect();
    let secs = start.elapsed().as_secs_f64();

    let mut pass = secs < 10.0;
    let mut parts = Vec::new();
    for run in &runs {
        if let Some((t, e)) = &run.failure {
            pass = false;
            parts.push(format!("{} failed at {t}: {e}", run.kind));
            continue;
        }
        let early: Vec<_> = run.records.iter().filter(|r| r.t < 1.0).collect();
        let early_dev = early
            .iter()
            .map(|r| (r.theta_e - PI / 4.0).abs())
            .fold(0.0, f64::max);
        let lift = early
            .iter()
            .map(|r| r.pose.translation.z.abs())
            .fold(0.0, f64::max);
        let settled: Vec<_> = run.records.iter().filter(|r| r.t >= 3.0).collect();
        let settled_theta = settled.iter().map(|r| r.theta_e).fold(0.0, f64::max);
        let settled_r = settled.iter().map(|r| r.r_e).fold(0.0, f64::max);
        let tail = summarize(&run.records, 30.0, 40.0).expect("samples in [30, 40]");
        let ok = early_dev < 0.05
            && lift > 0.05
            && settled_theta < 0.1
            && settled_r < 0.1
            && tail.mean_theta_e < 3.0 * cfg.sigma_r
            && tail.mean_r_e < 5.0 * cfg.sigma_p;
        pass &= ok;
        parts.push(format!(
            "{}: |θe-π/4| {early_dev:.3} (< 0.05) |z| {lift:.3} (> 0.05) t>=3 max θe {settled_theta:.3} re {settled_r:.3} (< 0.1) \
             [30,40] θe {:.4} (< {:.4}) re {:.4} (< 0.05)",
            run.kind,
            tail.mean_theta_e,
            3.0 * cfg.sigma_r,
            tail.mean_r_e
        ));
    }
    parts.push(format!("{secs:.2} s (< 10 s)"));
    Check {
        id: 5,
        name: "offset case convergence",
        pass,
        detail: parts.join("; "),
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn indistinguishable() -> Check {
    let (mut worst_theta, mut worst_r, mut worst_opt) = (0f64, 0f64, 0f64);
    let mut failed = Vec::new();
    for seed in 0..20 {
        let cfg = ExperimentConfig {
            seed,
            ..Default::default()
        };
        let scenario = simulate(&cfg).expect("valid config");
        let [la, lg, opt] = FilterKind::ALL.map(|k| run_filter(k, &cfg, &scenario));
        if let Some(run) = [&la, &lg, &opt].into_iter().find(|r| r.failure.is_some()) {
            failed.push(format!("seed {seed} {}", run.kind));
            continue;
        }
        let pairs = la.records.iter().zip(&lg.records);
        let d_theta = median(
            pairs
                .clone()
                .map(|(a, b)| (a.theta_e - b.theta_e).abs())
                .collect(),
        );
        let d_r = median(pairs.map(|(a, b)| (a.r_e - b.r_e).abs()).collect());
        worst_theta =
            worst_theta.max(d_theta / median(la.records.iter().map(|r| r.theta_e).collect()));
        worst_r = worst_r.max(d_r / median(la.records.iter().map(|r| r.r_e).collect()));
        let steady = la
            .records
            .iter()
            .zip(&opt.records)
            .filter(|(a, _)| a.t >= 30.0)
            .map(|(a, b)| a.pose.between(&b.pose).expect("close estimates").norm())
            .collect();
        worst_opt = worst_opt.max(median(steady));
    }
    Check {
        id: 6,
        name: "filter indistinguishability",
        pass: failed.is_empty() && worst_theta < 0.25 && worst_r < 0.25 && worst_opt < 1e-4,
        detail: format!(
            "20 seeds, worst median |Δθe|/median θe {worst_theta:.3} (< 0.25), |Δre|/median re {worst_r:.3} (< 0.25), \
             LA vs LA-Opt steady-state median distance {worst_opt:.2e} (< 1e-4), failed runs {failed:?}"
        ),
    }
}

pub fn timing() -> Check {
    let dir = tempfile::tempdir().expect("temp dir");
    let cfg = RunConfig {
        out: dir.path().to_path_buf(),
        bench_sets: 100,
        bench_samples: 1000,
        ..RunConfig::default()
    };
    if let Err(e) = cmd_bench(&cfg) {
        return Check {
            id: 7,
            name: "timing",
            pass: false,
            detail: format!("bench failed: {e}"),
        };
    }
    let text = std::fs::read_to_string(dir.path().join("bench.json")).expect("bench.json written");
    let json: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    let percent = |name: &str| {
        json["filters"]
            .as_array()
            .and_then(|a| a.iter().find(|f| f["filter"] == name))
            .and_then(|f| f["percent_of_ukf_lg"].as_f64())
            .unwrap_or(f64::NAN)
    };
    let la = percent(FilterKind::La.name()) / 100.0;
    let opt = percent(FilterKind::LaOpt.name()) / 100.0;
    let reference: Vec<String> = REFERENCE_PERCENT
        .iter()
        .map(|(k, p)| format!("{k} {p}%"))
        .collect();
    Check {
        id: 7,
        name: "timing",
        pass: la < 0.8 && opt > 1.0,
        detail: format!(
            "100 sets x 1000 samples, LA/LG {la:.3} (< 0.8), LA-Opt/LG {opt:.3} (> 1.0), reference {}",
            reference.join(", ")
        ),
    }
}

pub fn karcher_agreement() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut worst, mut rises, mut worst_rise) = (0f64, 0usize, 0f64);
    let mut errors = 0usize;
    for _ in 0..50 {
        let centre = Pose::exp(&Twist(Vec6::from_fn(|_, _| rng.random_range(-1.0..1.0))));
        let poses: Vec<Pose> = (0..25)
            .map(|_| centre.retract(&gaussian_twist(&mut rng, 0.05)))
            .collect();
        let Ok(k) = karcher_mean(&poses, KarcherOptions::default()) else {
            errors += 1;
            continue;
        };
        let logs: Vec<Twist> = poses
            .iter()
            .map(|p| p.log().expect("away from the cut locus"))
            .collect();
        let algebra = Pose::exp(&mean_on_algebra(
            &WeightedTwistSet::uniform(logs).expect("non-empty"),
        ));
        worst = worst.max(k.mean.between(&algebra).expect("close means").norm());
        let steps: Vec<f64> = k
            .objective
            .windows(2)
            .map(|w| (w[1] - w[0]) / w[0])
            .collect();
        if steps.iter().any(|&d| d > 0.0) {
            rises += 1;
        }
        worst_rise = steps.iter().copied().fold(worst_rise, f64::max);
    }
    Check {
        id: 8,
        name: "Karcher mean",
        pass: errors == 0 && worst <= 1e-3 && rises == 0,
        detail: format!(
            "50 clusters x 25 poses σ=0.05, worst distance to algebra mean {worst:.2e} (<= 1e-3); \
             objective rose in {rises}/50 clusters, worst relative rise {worst_rise:.2e} (none allowed); \
             errors {errors}"
        ),
    }
}

pub fn moment_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let params = UkfParams::default();
    let (mut mean_dev, mut cov_dev) = (0f64, 0f64);
    for _ in 0..100 {
        let a = Mat12::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let p = a * a.transpose();
        let s = make_sigma_points(&p, &params).expect("PSD input");
        let wm = s.w_mu();
        let mut mean = Vec12::zeros();
        let mut cov = Mat12::zeros();
        for (x, w) in s.points.iter().zip(&wm) {
            mean += x * *w;
            cov += x * x.transpose() * *w;
        }
        mean_dev = mean_dev.max(mean.amax());
        cov_dev = cov_dev.max((cov - p).amax());
    }
    Check {
        id: 9,
        name: "unscented moment identity",
        pass: mean_dev <= 1e-10 && cov_dev <= 1e-10,
        detail: format!("100 random P_aug, α=1e-3, mean dev {mean_dev:.2e}, scatter dev {cov_dev:.2e} (<= 1e-10)"),
    }
}

/// Every criterion, in order.
pub fn run_all() -> Vec<Check> {
    vec![
        jacobian_closed_form(),
        taylor_limits(),
        exp_log_roundtrip(),
        discretization_order(),
        offset_case(),
        indistinguishable(),
        timing(),
        karcher_agreement(),
        moment_identity(),
    ]
}
