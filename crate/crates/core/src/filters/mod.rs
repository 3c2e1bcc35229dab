//! Unscented Kalman filters on SE(3).
//!
//! All three variants share the state layout (a pose plus a covariance on the
//! right tangent space at that pose) and the pose measurement update. They
//! differ only in how sigma points are pushed through the motion model:
//!
//! * [`FilterKind::La`] propagates each point on the Lie algebra with the
//!   first-order logarithm ODE and averages in the algebra.
//! * [`FilterKind::Lg`] propagates each point on the group and maps it back
//!   with a logarithm.
//! * [`FilterKind::LaOpt`] propagates like `La` but replaces the algebra
//!   average by the weighted Karcher mean on the group.

mod propagate;
mod sigma;
mod update;

use std::fmt;
use std::str::FromStr;

use nalgebra::{SMatrix, SVector};

use crate::lie::{Mat6, Pose, Velocity};
use crate::stats::KarcherOptions;
use crate::{Error, Result};

pub use propagate::{ukf_la_opt_time_update, ukf_la_time_update, ukf_lg_time_update};
pub use sigma::{make_sigma_points, SigmaSet, SigmaWeights};
pub use update::ukf_la_measurement_update;

pub type Vec12 = SVector<f64, 12>;
pub type Mat12 = SMatrix<f64, 12, 12>;

/// Augmented dimension of both the time and the measurement update.
pub const AUG_DIM: usize = 12;

/// Sigma points with a rotation angle at or beyond this abort the step.
pub const DIVERGENCE_ANGLE: f64 = 2.0 * std::f64::consts::PI - 0.1;

/// How the measurement update maps a sigma point to a predicted measurement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ZetaMode {
    /// `log(exp(ξˣ) exp(ξ^ν))`
    #[default]
    Exact,
    /// `ξˣ + ξ^ν`
    Additive,
}

impl FromStr for ZetaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "additive" => Ok(Self::Additive),
            _ => Err(Error::InvalidInput(format!("unknown zeta mode `{s}`"))),
        }
    }
}

impl fmt::Display for ZetaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::Additive => "additive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UkfParams {
    pub alpha: f64,
    pub beta: f64,
    pub zeta_mode: ZetaMode,
    /// Used by [`FilterKind::LaOpt`] only.
    pub karcher: KarcherOptions,
}

impl Default for UkfParams {
    fn default() -> Self {
        Self {
            alpha: 1e-3,
            beta: 2.0,
            zeta_mode: ZetaMode::Exact,
            karcher: KarcherOptions::default(),
        }
    }
}

impl UkfParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidInput(format!(
                "beta must be finite, got {beta}"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            ..Self::default()
        })
    }

    /// `λ = (α² − 1) n`
    pub fn lambda(&self, n: usize) -> f64 {
        (self.alpha * self.alpha - 1.0) * n as f64
    }

    /// `n + λ = α² n`
    pub fn spread(&self, n: usize) -> f64 {
        self.alpha * self.alpha * n as f64
    }
}

/// Pose estimate and covariance on the right tangent space at it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterState {
    pub pose: Pose,
    pub cov: Mat6,
}

impl FilterState {
    pub fn new(pose: Pose, cov: Mat6) -> Self {
        Self { pose, cov }
    }
}

/// Velocity noise `Q` (continuous, per unit time step) and pose measurement noise `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    pub process: Mat6,
    pub measurement: Mat6,
}

impl NoiseParams {
    /// Isotropic blocks `Q = diag(σ_ω² I, σ_v² I)`, `N = diag(σ_R² I, σ_p² I)`.
    pub fn isotropic(sigma_omega: f64, sigma_v: f64, sigma_r: f64, sigma_p: f64) -> Self {
        let diag = |a: f64, b: f64| {
            let (a, b) = (a * a, b * b);
            Mat6::from_diagonal(&nalgebra::Vector6::new(a, a, a, b, b, b))
        };
        Self {
            process: diag(sigma_omega, sigma_v),
            measurement: diag(sigma_r, sigma_p),
        }
    }

    pub fn zero() -> Self {
        Self {
            process: Mat6::zeros(),
            measurement: Mat6::zeros(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FilterKind {
    La,
    Lg,
    LaOpt,
}

impl FilterKind {
    pub const ALL: [FilterKind; 3] = [FilterKind::La, FilterKind::Lg, FilterKind::LaOpt];

    pub fn name(&self) -> &'static str {
        match self {
            Self::La => "ukf-la",
            Self::Lg => "ukf-lg",
            Self::LaOpt => "ukf-la-opt",
        }
    }

    pub fn time_update(
        &self,
        state: &FilterState,
        noise: &NoiseParams,
        v: &Velocity,
        h: f64,
        params: &UkfParams,
    ) -> Result<FilterState> {
        match self {
            Self::La => ukf_la_time_update(state, noise, v, h, params),
            Self::Lg => ukf_lg_time_update(state, noise, v, h, params),
            Self::LaOpt => ukf_la_opt_time_update(state, noise, v, h, params),
        }
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown filter `{s}`")))
    }
}

/// A filter instance: variant, tuning and current estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct Ukf {
    pub kind: FilterKind,
    pub params: UkfParams,
    pub noise: NoiseParams,
    pub state: FilterState,
}

impl Ukf {
    pub fn new(
        kind: FilterKind,
        params: UkfParams,
        noise: NoiseParams,
        state: FilterState,
    ) -> Self {
        Self {
            kind,
            params,
            noise,
            state,
        }
    }

    /// Time update with measured velocity `v` over `h` seconds.
    pub fn predict(&mut self, v: &Velocity, h: f64) -> Result<()> {
        self.state = self
            .kind
            .time_update(&self.state, &self.noise, v, h, &self.params)?;
        Ok(())
    }

    /// Measurement update with a full pose measurement.
    pub fn correct(&mut self, z: &Pose) -> Result<()> {
        self.state = ukf_la_measurement_update(&self.state, z, &self.noise, &self.params)?;
        Ok(())
    }
}

pub(crate) fn check_divergence(points: &[Vec12]) -> Result<()> {
    for p in points {
        let angle = p.fixed_rows::<3>(0).norm();
        if !(angle < DIVERGENCE_ANGLE) {
            return Err(Error::JacobianSingular {
                angle,
                limit: DIVERGENCE_ANGLE,
            });
        }
    }
    Ok(())
}
