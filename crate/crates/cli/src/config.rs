//! Run configuration: defaults, `key=value` files and command-line overrides.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use se3_ukf::experiment::{Case, ExperimentConfig};
use se3_ukf::{FilterKind, ZetaMode};

use crate::CliError;

/// Which filters an `estimate` run executes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterSelection(pub Vec<FilterKind>);

impl FromStr for FilterSelection {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        if s == "all" {
            return Ok(Self(FilterKind::ALL.to_vec()));
        }
        s.parse::<FilterKind>().map(|k| Self(vec![k])).map_err(|_| {
            CliError::Config(format!(
                "unknown filter `{s}` (ukf-la, ukf-lg, ukf-la-opt or all)"
            ))
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub filters: FilterSelection,
    pub experiment: ExperimentConfig,
    pub out: PathBuf,
    pub bench_sets: usize,
    pub bench_samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            filters: FilterSelection(FilterKind::ALL.to_vec()),
            experiment: ExperimentConfig::default(),
            out: PathBuf::from("out"),
            bench_sets: 100,
            bench_samples: 1000,
        }
    }
}

/// Options shared by every subcommand. Each flag overrides the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct Options {
    /// `key=value` file using the long flag names as keys
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// ukf-la, ukf-lg, ukf-la-opt or all
    #[arg(long)]
    pub filter: Option<String>,
    /// Seconds
    #[arg(long)]
    pub duration: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// offset or zero
    #[arg(long)]
    pub case: Option<String>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Pose measurement rate, Hz
    #[arg(long)]
    pub meas_rate: Option<f64>,
    /// Velocity measurement rate, Hz
    #[arg(long)]
    pub vel_rate: Option<f64>,
    #[arg(long)]
    pub sigma_omega: Option<f64>,
    #[arg(long)]
    pub sigma_v: Option<f64>,
    #[arg(long)]
    pub sigma_r: Option<f64>,
    #[arg(long)]
    pub sigma_p: Option<f64>,
    /// Initial covariance scale
    #[arg(long)]
    pub p0: Option<f64>,
    /// exact or additive
    #[arg(long)]
    pub zeta_mode: Option<String>,
    #[arg(long)]
    pub bench_sets: Option<usize>,
    #[arg(long)]
    pub bench_samples: Option<usize>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value `{value}` for `{key}`")))
}

impl RunConfig {
    /// Defaults, then the config file (if any), then explicit flags.
    pub fn resolve(opts: &Options) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        if let Some(path) = &opts.config {
            cfg.apply_file(path)?;
        }
        cfg.apply_options(opts)?;
        cfg.experiment
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.apply_str(&text)
    }

    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_str(&mut self, text: &str) -> Result<(), CliError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", n + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let e = &mut self.experiment;
        match key.replace('_', "-").as_str() {
            "filter" => self.filters = value.parse()?,
            "duration" => e.duration = parse(key, value)?,
            "seed" => e.seed = parse(key, value)?,
            "case" => e.case = parse::<Case>(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "alpha" => e.params.alpha = parse(key, value)?,
            "beta" => e.params.beta = parse(key, value)?,
            "meas-rate" => e.pose_rate = parse(key, value)?,
            "vel-rate" => e.velocity_rate = parse(key, value)?,
            "sigma-omega" => e.sigma_omega = parse(key, value)?,
            "sigma-v" => e.sigma_v = parse(key, value)?,
            "sigma-r" => e.sigma_r = parse(key, value)?,
            "sigma-p" => e.sigma_p = parse(key, value)?,
            "p0" => e.p0 = parse(key, value)?,
            "zeta-mode" => e.params.zeta_mode = parse::<ZetaMode>(key, value)?,
            "bench-sets" => self.bench_sets = parse(key, value)?,
            "bench-samples" => self.bench_samples = parse(key, value)?,
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    fn apply_options(&mut self, o: &Options) -> Result<(), CliError> {
        let e = &mut self.experiment;
        if let Some(v) = &o.filter {
            self.filters = v.parse()?;
        }
        if let Some(v) = &o.case {
            e.case = parse("case", v)?;
        }
        if let Some(v) = &o.zeta_mode {
            e.params.zeta_mode = parse("zeta-mode", v)?;
        }
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        macro_rules! copy {
            ($($src:ident => $dst:expr),* $(,)?) => {
                $(if let Some(v) = o.$src { $dst = v; })*
            };
        }
        copy! {
            duration => e.duration,
            seed => e.seed,
            alpha => e.params.alpha,
            beta => e.params.beta,
            meas_rate => e.pose_rate,
            vel_rate => e.velocity_rate,
            sigma_omega => e.sigma_omega,
            sigma_v => e.sigma_v,
            sigma_r => e.sigma_r,
            sigma_p => e.sigma_p,
            p0 => e.p0,
            bench_sets => self.bench_sets,
            bench_samples => self.bench_samples,
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut cfg = RunConfig::default();
        cfg.apply_str("# comment\nseed = 7\nfilter=ukf-lg\ncase=zero\nsigma_p=0.02 # trailing\n")
            .unwrap();
        assert_eq!(cfg.experiment.seed, 7);
        assert_eq!(cfg.filters.0, vec![FilterKind::Lg]);
        assert_eq!(cfg.experiment.case, Case::Zero);
        assert_eq!(cfg.experiment.sigma_p, 0.02);

        let opts = Options {
            seed: Some(9),
            zeta_mode: Some("additive".into()),
            ..Default::default()
        };
        cfg.apply_options(&opts).unwrap();
        assert_eq!(cfg.experiment.seed, 9);
        assert_eq!(cfg.experiment.params.zeta_mode, ZetaMode::Additive);
        assert_eq!(cfg.experiment.sigma_p, 0.02);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_str("nonsense=1").is_err());
        assert!(cfg.apply_str("seed").is_err());
        assert!(cfg.apply_str("alpha=abc").is_err());
        assert!(cfg.set("filter", "ukf-xx").is_err());
    }

    #[test]
    fn resolve_validates() {
        let opts = Options {
            alpha: Some(0.0),
            ..Default::default()
        };
        assert!(matches!(
            RunConfig::resolve(&opts),
            Err(CliError::Config(_))
        ));
        let opts = Options {
            meas_rate: Some(3.0),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&opts).is_err());
    }
}
