//! Concentrated Gaussians on SE(3), tangent-space moments and the Karcher mean.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::lie::{se3, Mat6, Pose, Twist, Vec6};
use crate::linalg::{min_eigenvalue, psd_cholesky, symmetrize};
use crate::{Error, Result};

/// Tolerance on `Σ wᵢ − 1` for mean weights.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Most negative eigenvalue accepted as positive semi-definite.
pub const PSD_TOL: f64 = 1e-10;

/// `X = mean · exp(u)`, `u ~ N(0, cov)` on the right tangent space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianOnGroup {
    pub mean: Pose,
    pub cov: Mat6,
}

impl GaussianOnGroup {
    /// Symmetrizes `cov` and checks it is PSD within [`PSD_TOL`].
    pub fn new(mean: Pose, cov: Mat6) -> Result<Self> {
        let cov = symmetrize(&cov);
        let min = min_eigenvalue(&cov);
        if !(min >= -PSD_TOL) {
            return Err(Error::CovarianceNotPsd {
                min_eigenvalue: min,
            });
        }
        Ok(Self { mean, cov })
    }

    /// Draws `u ~ N(0, cov)`.
    pub fn sample_twist<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Twist> {
        draw(&self.cov, rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Pose> {
        let u = self.sample_twist(rng)?;
        if u.0 == Vec6::zeros() {
            return Ok(self.mean);
        }
        Ok(self.mean.retract(&u))
    }
}

/// Zero-mean normal draw with covariance `cov`, via a semidefinite Cholesky factor.
pub fn draw<R: Rng + ?Sized>(cov: &Mat6, rng: &mut R) -> Result<Twist> {
    let l = psd_cholesky(&symmetrize(cov)).ok_or_else(|| Error::CovarianceNotPsd {
        min_eigenvalue: min_eigenvalue(cov),
    })?;
    let z = Vec6::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    Ok(Twist(l * z))
}

/// Twists with mean weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedTwistSet {
    twists: Vec<Twist>,
    weights: Vec<f64>,
}

impl WeightedTwistSet {
    pub fn new(twists: Vec<Twist>, weights: Vec<f64>) -> Result<Self> {
        if twists.len() != weights.len() {
            return Err(Error::InvalidWeights(format!(
                "{} twists but {} weights",
                twists.len(),
                weights.len()
            )));
        }
        if twists.is_empty() {
            return Err(Error::InvalidWeights("empty set".into()));
        }
        check_weight_sum(&weights)?;
        Ok(Self { twists, weights })
    }

    pub fn uniform(twists: Vec<Twist>) -> Result<Self> {
        let n = twists.len();
        Self::new(twists, vec![1.0 / n as f64; n])
    }

    pub fn twists(&self) -> &[Twist] {
        &self.twists
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.twists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.twists.is_empty()
    }
}

fn check_weight_sum(weights: &[f64]) -> Result<()> {
    let sum = compensated_sum(weights);
    if !((sum - 1.0).abs() <= WEIGHT_SUM_TOL) {
        return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
    }
    Ok(())
}

/// Neumaier summation.
fn compensated_sum(xs: &[f64]) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for &x in xs {
        let t = sum + x;
        c += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    sum + c
}

/// `Σ wᵢ ξᵢ`
pub fn mean_on_algebra(set: &WeightedTwistSet) -> Twist {
    weighted_sum(&set.twists, &set.weights)
}

/// `Σ wᵢ ξᵢ` for weights summing to one, evaluated as `ξ₀ + Σ wᵢ (ξᵢ − ξ₀)`.
///
/// Unscented weights reach `|w₀| ~ 1e6`; anchoring on the first twist keeps
/// the rounding proportional to the spread of the set rather than its size.
pub(crate) fn weighted_sum(twists: &[Twist], weights: &[f64]) -> Twist {
    let Some(first) = twists.first() else {
        return Twist::zero();
    };
    let mut acc = Vec6::zeros();
    for (x, &w) in twists.iter().zip(weights).skip(1) {
        acc += (x.0 - first.0) * w;
    }
    Twist(first.0 + acc)
}

/// `Σ wᵢ (ξᵢ − μ)(ξᵢ − μ)ᵀ`, symmetrized. No Jacobian transport.
pub fn scatter(twists: &[Twist], mean: &Twist, weights: &[f64]) -> Mat6 {
    let mut s = Mat6::zeros();
    for (x, &w) in twists.iter().zip(weights) {
        let d = x.0 - mean.0;
        s += d * d.transpose() * w;
    }
    symmetrize(&s)
}

/// `Φ_r(μ) S Φ_r(μ)ᵀ` with `S` the `weights_p`-weighted scatter about `mean`.
///
/// Indefinite results are returned as-is; unscented weights can make the
/// scatter lose semi-definiteness and callers decide what to do about it.
pub fn covariance_on_algebra(
    set: &WeightedTwistSet,
    mean: &Twist,
    weights_p: &[f64],
) -> Result<Mat6> {
    if weights_p.len() != set.len() {
        return Err(Error::InvalidWeights(format!(
            "{} covariance weights for {} twists",
            weights_p.len(),
            set.len()
        )));
    }
    Ok(transport(mean, &scatter(&set.twists, mean, weights_p)))
}

pub(crate) fn transport(mean: &Twist, s: &Mat6) -> Mat6 {
    let j = se3::jac_r(mean);
    symmetrize(&(j * s * j.transpose()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KarcherOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for KarcherOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KarcherMean {
    pub mean: Pose,
    /// Number of corrections `X ← X·exp(𝔞)` applied.
    pub iterations: usize,
    /// `‖𝔞‖` at the returned point.
    pub gradient_norm: f64,
    /// `Σ wᵢ ‖log(X⁻¹Yᵢ)‖²` at every visited `X`, starting point included.
    pub objective: Vec<f64>,
}

/// Uniformly weighted Karcher mean.
pub fn karcher_mean(poses: &[Pose], opts: KarcherOptions) -> Result<KarcherMean> {
    if poses.is_empty() {
        return Err(Error::InvalidInput("Karcher mean of an empty set".into()));
    }
    let w = vec![1.0 / poses.len() as f64; poses.len()];
    weighted_karcher_mean(poses, &w, opts)
}

/// Weighted Karcher mean, started from `exp(Σ wᵢ log Yᵢ)`.
///
/// Weights must sum to one and may be negative.
pub fn weighted_karcher_mean(
    poses: &[Pose],
    weights: &[f64],
    opts: KarcherOptions,
) -> Result<KarcherMean> {
    let logs = poses.iter().map(se3::log).collect::<Result<Vec<_>>>()?;
    karcher_from(
        poses,
        weights,
        se3::exp(&weighted_sum(&logs, weights)),
        opts,
    )
}

/// As [`weighted_karcher_mean`] for the poses `exp(ξᵢ)`, reusing `ξᵢ` as their logarithms.
pub fn weighted_karcher_mean_of_twists(
    twists: &[Twist],
    weights: &[f64],
    opts: KarcherOptions,
) -> Result<KarcherMean> {
    let poses: Vec<Pose> = twists.iter().map(se3::exp).collect();
    karcher_from(
        &poses,
        weights,
        se3::exp(&weighted_sum(twists, weights)),
        opts,
    )
}

fn karcher_from(
    poses: &[Pose],
    weights: &[f64],
    start: Pose,
    opts: KarcherOptions,
) -> Result<KarcherMean> {
    if poses.len() != weights.len() || poses.is_empty() {
        return Err(Error::InvalidWeights(format!(
            "{} poses but {} weights",
            poses.len(),
            weights.len()
        )));
    }
    check_weight_sum(weights)?;

    let mut x = start;
    let mut objective = Vec::new();
    let mut eps = vec![Twist::zero(); poses.len()];
    for iterations in 0..=opts.max_iter {
        let x_inv = x.inverse();
        let mut scale = 0.0;
        for (e, y) in eps.iter_mut().zip(poses) {
            *e = se3::log(&(x_inv * *y))?;
        }
        let mut obj = 0.0;
        for (e, &w) in eps.iter().zip(weights) {
            obj += w * e.0.norm_squared();
            scale += w.abs() * (e.0 - eps[0].0).norm();
        }
        objective.push(obj);
        let step = weighted_sum(&eps, weights);
        let gradient_norm = step.norm();
        // Rounding in Σ wᵢεᵢ grows with Σ|wᵢ|‖εᵢ − ε₀‖; below that the step is noise.
        if gradient_norm < opts.tol.max(16.0 * f64::EPSILON * scale) {
            return Ok(KarcherMean {
                mean: x,
                iterations,
                gradient_norm,
                objective,
            });
        }
        if iterations == opts.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                gradient_norm,
            });
        }
        x = x.retract(&step);
    }
    unreachable!("loop returns on its last iteration")
}
