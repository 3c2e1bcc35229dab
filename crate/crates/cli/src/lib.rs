//! Driver for the case studies and the timing benchmark.
//!
//! `simulate` writes the ground truth and the synthetic measurements,
//! `estimate` runs filters over them and `bench` times the three filters.
//! Every file except `timing.json` is a pure function of the configuration.

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use se3_ukf::experiment::{
    bench, run_filter, simulate, summarize, ErrorSummary, FilterRun, Scenario,
};
use se3_ukf::lie::Pose;
use se3_ukf::FilterKind;

pub use config::{FilterSelection, Options, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIVERGED: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// Steady-state statistics cover this many final seconds.
pub const STEADY_STATE_WINDOW: f64 = 10.0;

/// Published reference timings relative to UKF-LG, percent.
pub const REFERENCE_PERCENT: [(FilterKind, f64); 3] = [
    (FilterKind::La, 37.3),
    (FilterKind::Lg, 100.0),
    (FilterKind::LaOpt, 117.3),
];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] se3_ukf::Error),
    #[error("{filter} diverged at t = {t} s: {error}")]
    Diverged {
        filter: FilterKind,
        t: f64,
        error: se3_ukf::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Diverged { .. } => EXIT_DIVERGED,
            Self::Io { .. } | Self::Config(_) | Self::Core(_) => EXIT_CONFIG,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "se3ukf", version, about = "Unscented Kalman filters on SE(3)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write truth.csv and measurements.csv
    Simulate(Options),
    /// Run filters and write errors.csv, summary.json and timing.json
    Estimate(Options),
    /// Time the filters and write bench.json
    Bench(Options),
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(o) => cmd_simulate(&RunConfig::resolve(o)?),
        Command::Estimate(o) => cmd_estimate(&RunConfig::resolve(o)?),
        Command::Bench(o) => cmd_bench(&RunConfig::resolve(o)?),
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn push_row(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

fn pose_fields(p: &Pose) -> Vec<String> {
    let m = p.to_matrix();
    (0..3)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)].to_string())
        .collect()
}

pub const TRUTH_HEADER: &str =
    "t,T11,T12,T13,T14,T21,T22,T23,T24,T31,T32,T33,T34,omega_x,omega_y,omega_z,v_x,v_y,v_z";
pub const MEASUREMENTS_HEADER: &str = "t,kind,v1,v2,v3,v4,v5,v6,v7,v8,v9,v10,v11,v12";
pub const ERRORS_HEADER: &str = "t,filter,theta_e,r_e,trace_P";

pub fn truth_csv(scenario: &Scenario) -> String {
    let mut out = format!("{TRUTH_HEADER}\n");
    for s in &scenario.truth {
        let mut row = vec![s.t.to_string()];
        row.extend(pose_fields(&s.pose));
        row.extend(s.velocity.0.iter().map(f64::to_string));
        push_row(&mut out, &row);
    }
    out
}

/// Velocity rows fill `v1..v6` with `[ω, v]`; pose rows hold `[R | r]` row-major.
pub fn measurements_csv(scenario: &Scenario) -> String {
    let mut out = format!("{MEASUREMENTS_HEADER}\n");
    let m = &scenario.measurements;
    let mut poses = m.pose.iter().peekable();
    for (k, v) in m.velocity.iter().enumerate() {
        let mut row = vec![v.t.to_string(), "velocity".to_string()];
        row.extend(v.velocity.0.iter().map(f64::to_string));
        row.extend(std::iter::repeat_n(String::new(), 6));
        push_row(&mut out, &row);
        if let Some(z) = poses.next_if(|z| z.index == k) {
            let mut row = vec![z.t.to_string(), "pose".to_string()];
            row.extend(pose_fields(&z.pose));
            push_row(&mut out, &row);
        }
    }
    out
}

pub fn errors_csv(runs: &[FilterRun]) -> String {
    let mut out = format!("{ERRORS_HEADER}\n");
    for run in runs {
        for r in &run.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.t, run.kind, r.theta_e, r.r_e, r.trace_p
            );
        }
    }
    out
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<(), CliError> {
    let scenario = simulate(&cfg.experiment)?;
    write(&cfg.out, "truth.csv", &truth_csv(&scenario))?;
    write(&cfg.out, "measurements.csv", &measurements_csv(&scenario))
}

#[derive(Serialize)]
struct ConfigEcho {
    duration: f64,
    velocity_rate: f64,
    pose_rate: f64,
    sigma_omega: f64,
    sigma_v: f64,
    sigma_r: f64,
    sigma_p: f64,
    p0: f64,
    alpha: f64,
    beta: f64,
    zeta_mode: String,
    case: &'static str,
    seed: u64,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(c: &RunConfig) -> Self {
        let e = &c.experiment;
        Self {
            duration: e.duration,
            velocity_rate: e.velocity_rate,
            pose_rate: e.pose_rate,
            sigma_omega: e.sigma_omega,
            sigma_v: e.sigma_v,
            sigma_r: e.sigma_r,
            sigma_p: e.sigma_p,
            p0: e.p0,
            alpha: e.params.alpha,
            beta: e.params.beta,
            zeta_mode: e.params.zeta_mode.to_string(),
            case: e.case.name(),
            seed: e.seed,
        }
    }
}

#[derive(Serialize)]
struct Window {
    from: f64,
    to: f64,
    samples: usize,
    mean_theta_e: f64,
    max_theta_e: f64,
    mean_r_e: f64,
    max_r_e: f64,
}

#[derive(Serialize)]
struct Failure {
    t: f64,
    error: String,
}

#[derive(Serialize)]
struct FilterSummary {
    filter: &'static str,
    status: &'static str,
    failure: Option<Failure>,
    steady_state: Option<Window>,
}

#[derive(Serialize)]
struct Summary {
    config: ConfigEcho,
    filters: Vec<FilterSummary>,
}

fn window(from: f64, to: f64, s: ErrorSummary) -> Window {
    Window {
        from,
        to,
        samples: s.samples,
        mean_theta_e: s.mean_theta_e,
        max_theta_e: s.max_theta_e,
        mean_r_e: s.mean_r_e,
        max_r_e: s.max_r_e,
    }
}

#[derive(Serialize)]
struct Timing {
    filter: &'static str,
    wall_seconds: f64,
}

/// Runs the selected filters on one shared scenario.
///
/// All output files are written before a divergence is reported.
pub fn cmd_estimate(cfg: &RunConfig) -> Result<(), CliError> {
    let scenario = simulate(&cfg.experiment)?;
    let to = scenario.truth.last().map_or(0.0, |s| s.t);
    let from = (to - STEADY_STATE_WINDOW).max(0.0);

    let mut runs = Vec::new();
    let mut timing = Vec::new();
    for &kind in &cfg.filters.0 {
        let start = Instant::now();
        let run = run_filter(kind, &cfg.experiment, &scenario);
        timing.push(Timing {
            filter: kind.name(),
            wall_seconds: start.elapsed().as_secs_f64(),
        });
        runs.push(run);
    }

    let summary = Summary {
        config: cfg.into(),
        filters: runs
            .iter()
            .map(|run| FilterSummary {
                filter: run.kind.name(),
                status: if run.failure.is_some() {
                    "diverged"
                } else {
                    "ok"
                },
                failure: run.failure.as_ref().map(|(t, e)| Failure {
                    t: *t,
                    error: e.to_string(),
                }),
                steady_state: summarize(&run.records, from, to).map(|s| window(from, to, s)),
            })
            .collect(),
    };

    write(&cfg.out, "errors.csv", &errors_csv(&runs))?;
    write(&cfg.out, "summary.json", &to_json(&summary))?;
    write(&cfg.out, "timing.json", &to_json(&timing))?;

    match runs
        .into_iter()
        .find_map(|r| r.failure.map(|f| (r.kind, f)))
    {
        Some((filter, (t, error))) => Err(CliError::Diverged { filter, t, error }),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct BenchFilter {
    filter: &'static str,
    mean_seconds: f64,
    percent_of_ukf_lg: f64,
    reference_percent: f64,
}

#[derive(Serialize)]
struct BenchJson {
    sets: usize,
    samples: usize,
    velocity_rate: f64,
    pose_rate: f64,
    seed: u64,
    filters: Vec<BenchFilter>,
}

/// Times all three filters; the filter selection does not apply.
pub fn cmd_bench(cfg: &RunConfig) -> Result<(), CliError> {
    let report = bench(&cfg.experiment, cfg.bench_sets, cfg.bench_samples)?;
    let e = &cfg.experiment;
    let json = BenchJson {
        sets: report.sets,
        samples: report.samples,
        velocity_rate: e.velocity_rate,
        pose_rate: e.pose_rate,
        seed: e.seed,
        filters: report
            .entries
            .iter()
            .map(|entry| BenchFilter {
                filter: entry.kind.name(),
                mean_seconds: entry.mean(),
                percent_of_ukf_lg: 100.0 * report.ratio(entry.kind).unwrap_or(f64::NAN),
                reference_percent: REFERENCE_PERCENT
                    .iter()
                    .find(|(k, _)| *k == entry.kind)
                    .map_or(f64::NAN, |(_, p)| *p),
            })
            .collect(),
    };
    write(&cfg.out, "bench.json", &to_json(&json))
}
