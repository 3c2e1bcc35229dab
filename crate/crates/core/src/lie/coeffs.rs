//! Scalar coefficients of the SO(3)/SE(3) closed forms.
//!
//! Every coefficient is a ratio that evaluates to 0/0 at `θ = 0`. Below a
//! per-coefficient switch angle the Taylor expansion through `θ⁴` is used
//! instead. The switch angle grows with the order of the cancellation in the
//! numerator: a `1/θ⁴` coefficient loses about `ε/θ⁴` to rounding, so it has
//! to switch much later than `sin θ / θ`. Each switch is placed where the
//! closed form and the truncated series agree to better than `1e-10`.

/// A coefficient with a closed form and a small-angle series `c₀ + c₂θ² + c₄θ⁴`.
#[derive(Clone, Copy, Debug)]
pub struct Coefficient {
    pub name: &'static str,
    /// The Taylor branch is used for `θ < switch`.
    pub switch: f64,
    pub series: [f64; 3],
    closed: fn(f64) -> f64,
}

impl Coefficient {
    #[inline]
    pub fn eval(&self, theta: f64) -> f64 {
        if theta < self.switch {
            self.taylor(theta)
        } else {
            (self.closed)(theta)
        }
    }

    #[inline]
    pub fn taylor(&self, theta: f64) -> f64 {
        let t2 = theta * theta;
        self.series[0] + t2 * (self.series[1] + t2 * self.series[2])
    }

    pub fn closed(&self, theta: f64) -> f64 {
        (self.closed)(theta)
    }
}

/// `α(y) = (y/2) cot(y/2)`
#[inline]
pub fn alpha(y: f64) -> f64 {
    let half = 0.5 * y;
    half / half.tan()
}

/// `β(y) = (y/2)² / sin²(y/2)`
#[inline]
pub fn beta(y: f64) -> f64 {
    let half = 0.5 * y;
    let s = half / half.sin();
    s * s
}

/// `sin θ / θ`
pub const SINC: Coefficient = Coefficient {
    name: "sin(t)/t",
    switch: 1e-4,
    series: [1.0, -1.0 / 6.0, 1.0 / 120.0],
    closed: |t| t.sin() / t,
};

/// `(1 − cos θ) / θ²`, evaluated as `2 sin²(θ/2) / θ²`.
pub const ONE_MINUS_COS: Coefficient = Coefficient {
    name: "(1-cos(t))/t^2",
    switch: 1e-4,
    series: [0.5, -1.0 / 24.0, 1.0 / 720.0],
    closed: |t| {
        let s = (0.5 * t).sin();
        2.0 * s * s / (t * t)
    },
};

/// `(θ − sin θ) / θ³`
pub const THETA_MINUS_SIN: Coefficient = Coefficient {
    name: "(t-sin(t))/t^3",
    switch: 1e-2,
    series: [1.0 / 6.0, -1.0 / 120.0, 1.0 / 5040.0],
    closed: |t| (t - t.sin()) / (t * t * t),
};

/// `θ / sin θ`, the scale factor of the SO(3) logarithm.
pub const THETA_OVER_SIN: Coefficient = Coefficient {
    name: "t/sin(t)",
    switch: 1e-4,
    series: [1.0, 1.0 / 6.0, 7.0 / 360.0],
    closed: |t| t / t.sin(),
};

/// `(1 − α(θ)) / θ²`, the `θ̂²` coefficient of `Ψ_r⁻¹` and the `θ̂ρ̂ + ρ̂θ̂`
/// coefficient of `C_r`.
pub const INV_JAC_QUADRATIC: Coefficient = Coefficient {
    name: "(1-alpha(t))/t^2",
    switch: 1e-2,
    series: [1.0 / 12.0, 1.0 / 720.0, 1.0 / 30240.0],
    closed: |t| (1.0 - alpha(t)) / (t * t),
};

/// `(α(θ) + β(θ) − 2) / θ⁴`, the `(θᵀρ) θ̂²` coefficient of `C_r`.
///
/// Its limit at zero is `+1/360`. The series `−1/720 − θ²/15120 − …` that is
/// sometimes quoted next to it belongs to `γ₂ = (2 − α − β)/(2θ⁴)`, which is
/// `−½` times this coefficient.
pub const INV_JAC_QUARTIC: Coefficient = Coefficient {
    name: "(alpha(t)+beta(t)-2)/t^4",
    switch: 0.1,
    series: [1.0 / 360.0, 1.0 / 7560.0, 1.0 / 201600.0],
    closed: |t| (alpha(t) + beta(t) - 2.0) / (t * t * t * t),
};

/// `(1 − θ²/2 − cos θ) / θ⁴`, used in the closed form of `Q`.
pub const Q_QUARTIC: Coefficient = Coefficient {
    name: "(1-t^2/2-cos(t))/t^4",
    switch: 0.1,
    series: [-1.0 / 24.0, 1.0 / 720.0, -1.0 / 40320.0],
    closed: |t| {
        let t2 = t * t;
        (1.0 - 0.5 * t2 - t.cos()) / (t2 * t2)
    },
};

/// `(1 − θ²/2 − cos θ)/θ⁴ − 3(θ − sin θ − θ³/6)/θ⁵`, used in the closed form of `Q`.
pub const Q_QUINTIC: Coefficient = Coefficient {
    name: "q_quartic(t)-3(t-sin(t)-t^3/6)/t^5",
    switch: 0.1,
    series: [-1.0 / 60.0, 1.0 / 1260.0, -1.0 / 60480.0],
    closed: |t| {
        let t2 = t * t;
        let t4 = t2 * t2;
        (1.0 - 0.5 * t2 - t.cos()) / t4 - 3.0 * (t - t.sin() - t * t2 / 6.0) / (t4 * t)
    },
};

/// `γ₂(θ) = (2 − α(θ) − β(θ)) / (2θ⁴)`, the `ad⁴` coefficient of the
/// polynomial form `Φ_r⁻¹ = I + ½ad + γ₁ad² + γ₂ad⁴`.
#[inline]
pub fn gamma2(theta: f64) -> f64 {
    -0.5 * INV_JAC_QUARTIC.eval(theta)
}

/// `γ₁(θ) = (4 − 3α(θ) − β(θ)) / (2θ²) = (1 − α)/θ² + θ²γ₂`.
#[inline]
pub fn gamma1(theta: f64) -> f64 {
    INV_JAC_QUADRATIC.eval(theta) + theta * theta * gamma2(theta)
}

pub const ALL: [Coefficient; 8] = [
    SINC,
    ONE_MINUS_COS,
    THETA_MINUS_SIN,
    THETA_OVER_SIN,
    INV_JAC_QUADRATIC,
    INV_JAC_QUARTIC,
    Q_QUARTIC,
    Q_QUINTIC,
];
