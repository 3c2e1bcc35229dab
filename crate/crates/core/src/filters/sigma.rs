use super::{Mat12, UkfParams, Vec12, AUG_DIM};
use crate::linalg::psd_cholesky;
use crate::{Error, Result};

/// Unscented weights for an `n`-dimensional augmented state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SigmaWeights {
    pub mean_0: f64,
    pub cov_0: f64,
    /// Shared by every point but the centre, for both mean and covariance.
    pub other: f64,
}

impl SigmaWeights {
    pub fn new(params: &UkfParams, n: usize) -> Self {
        let spread = params.spread(n);
        let nf = n as f64;
        // Snap the off-centre weight to a binary grid coarse enough that
        // `2n·w` and `1 − 2n·w` are exact, so the mean weights sum to one
        // in floating point even when |w₀| ~ 1e6. The snap moves `w` by
        // less than one part in 1e14.
        let raw = 0.5 / spread;
        let grid = (2.0 * nf * raw + 1.0).log2().ceil() - 52.0;
        let grid = 2f64.powf(grid.min(0.0));
        let other = (raw / grid).round() * grid;
        let mean_0 = 1.0 - 2.0 * nf * other;
        let a2 = params.alpha * params.alpha;
        Self {
            mean_0,
            cov_0: mean_0 + 1.0 - a2 + params.beta,
            other,
        }
    }

    pub fn mean(&self, i: usize) -> f64 {
        if i == 0 {
            self.mean_0
        } else {
            self.other
        }
    }

    pub fn cov(&self, i: usize) -> f64 {
        if i == 0 {
            self.cov_0
        } else {
            self.other
        }
    }
}

/// `2n + 1` augmented points: zero, then `+σⱼ`, then `−σⱼ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaSet {
    pub points: Vec<Vec12>,
    pub weights: SigmaWeights,
}

impl SigmaSet {
    pub fn w_mu(&self) -> Vec<f64> {
        (0..self.points.len())
            .map(|i| self.weights.mean(i))
            .collect()
    }

    pub fn w_p(&self) -> Vec<f64> {
        (0..self.points.len())
            .map(|i| self.weights.cov(i))
            .collect()
    }
}

/// Sigma points from the lower Cholesky factor of `(m + λ) P_aug`.
pub fn make_sigma_points(p_aug: &Mat12, params: &UkfParams) -> Result<SigmaSet> {
    let l = psd_cholesky(&(p_aug * params.spread(AUG_DIM))).ok_or(Error::CholeskyFailure)?;
    let mut points = Vec::with_capacity(2 * AUG_DIM + 1);
    points.push(Vec12::zeros());
    for j in 0..AUG_DIM {
        points.push(l.column(j).into_owned());
    }
    for j in 0..AUG_DIM {
        points.push(-l.column(j));
    }
    Ok(SigmaSet {
        points,
        weights: SigmaWeights::new(params, AUG_DIM),
    })
}
