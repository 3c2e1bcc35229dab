use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::SVD;

use super::{se3, so3, Mat3, Mat4, Vec3, Vec6};
use crate::{Error, Result};

/// Tolerance on `‖RᵀR − I‖_F` and `|det R − 1|`.
pub const ORTHONORMALITY_TOL: f64 = 1e-9;

/// A rotation matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    /// Checks `RᵀR = I` and `det R = 1` within [`ORTHONORMALITY_TOL`].
    pub fn from_matrix(m: Mat3) -> Result<Self> {
        if !m.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidRotation("non-finite entry".into()));
        }
        let r = Self(m);
        let drift = r.orthonormality_error();
        if drift > ORTHONORMALITY_TOL {
            return Err(Error::InvalidRotation(format!("|R^T R - I|_F = {drift:e}")));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > ORTHONORMALITY_TOL {
            return Err(Error::InvalidRotation(format!("det R = {det}")));
        }
        Ok(r)
    }

    pub(crate) fn from_matrix_unchecked(m: Mat3) -> Self {
        Self(m)
    }

    pub fn exp(theta: &Vec3) -> Self {
        so3::exp(theta)
    }

    pub fn log(&self) -> Result<Vec3> {
        so3::log(self)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn orthonormality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat3::identity()).norm()
    }

    /// Projects onto SO(3) (polar factor) if the drift exceeds [`ORTHONORMALITY_TOL`].
    pub fn renormalized(self) -> Self {
        if self.orthonormality_error() <= ORTHONORMALITY_TOL {
            return self;
        }
        let svd = SVD::new(self.0, true, true);
        let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
        let mut m = u * v_t;
        if m.determinant() < 0.0 {
            let mut u = u;
            u.column_mut(2).neg_mut();
            m = u * v_t;
        }
        Self(m)
    }
}

impl Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0).renormalized()
    }
}

/// A rigid transform `[[R, r], [0ᵀ, 1]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub rotation: Rotation,
    pub translation: Vec3,
}

impl Pose {
    pub fn new(rotation: Rotation, translation: Vec3) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(Rotation::identity(), Vec3::zeros())
    }

    pub fn from_matrix(m: &Mat4) -> Result<Self> {
        let bottom = m.fixed_view::<1, 4>(3, 0);
        if (bottom - nalgebra::RowVector4::new(0.0, 0.0, 0.0, 1.0)).amax() > ORTHONORMALITY_TOL {
            return Err(Error::InvalidInput(
                "bottom row of a pose must be [0 0 0 1]".into(),
            ));
        }
        let rotation = Rotation::from_matrix(m.fixed_view::<3, 3>(0, 0).into_owned())?;
        Ok(Self::new(rotation, m.fixed_view::<3, 1>(0, 3).into_owned()))
    }

    pub fn to_matrix(&self) -> Mat4 {
        let mut m = Mat4::identity();
        m.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(self.rotation.matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self::new(rt, -(rt.matrix() * self.translation))
    }

    pub fn exp(xi: &Twist) -> Self {
        se3::exp(xi)
    }

    pub fn log(&self) -> Result<Twist> {
        se3::log(self)
    }

    /// `T · exp(ξ)`
    pub fn retract(&self, xi: &Twist) -> Self {
        *self * se3::exp(xi)
    }

    /// `log(self⁻¹ · other)`
    pub fn between(&self, other: &Pose) -> Result<Twist> {
        se3::log(&(self.inverse() * *other))
    }
}

impl Mul for Pose {
    type Output = Pose;

    fn mul(self, rhs: Pose) -> Pose {
        Pose::new(
            self.rotation * rhs.rotation,
            self.rotation.matrix() * rhs.translation + self.translation,
        )
    }
}

/// Vector form `ξ = [θᵀ, ρᵀ]ᵀ` of an se(3) element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Twist(pub Vec6);

impl Twist {
    pub fn new(theta: Vec3, rho: Vec3) -> Self {
        Self(Vec6::new(theta.x, theta.y, theta.z, rho.x, rho.y, rho.z))
    }

    pub fn zero() -> Self {
        Self(Vec6::zeros())
    }

    pub fn theta(&self) -> Vec3 {
        self.0.fixed_rows::<3>(0).into_owned()
    }

    pub fn rho(&self) -> Vec3 {
        self.0.fixed_rows::<3>(3).into_owned()
    }

    /// Rotation angle `‖θ‖`.
    pub fn angle(&self) -> f64 {
        self.0.fixed_rows::<3>(0).norm()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn as_vector(&self) -> &Vec6 {
        &self.0
    }
}

impl From<Vec6> for Twist {
    fn from(v: Vec6) -> Self {
        Self(v)
    }
}

impl Add for Twist {
    type Output = Twist;
    fn add(self, rhs: Twist) -> Twist {
        Twist(self.0 + rhs.0)
    }
}

impl AddAssign for Twist {
    fn add_assign(&mut self, rhs: Twist) {
        self.0 += rhs.0;
    }
}

impl Sub for Twist {
    type Output = Twist;
    fn sub(self, rhs: Twist) -> Twist {
        Twist(self.0 - rhs.0)
    }
}

impl Neg for Twist {
    type Output = Twist;
    fn neg(self) -> Twist {
        Twist(-self.0)
    }
}

impl Mul<f64> for Twist {
    type Output = Twist;
    fn mul(self, rhs: f64) -> Twist {
        Twist(self.0 * rhs)
    }
}

/// Right (body-frame) velocity `V = [ωᵀ, vᵀ]ᵀ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Velocity(pub Vec6);

impl Velocity {
    pub fn new(omega: Vec3, v: Vec3) -> Self {
        Self(Vec6::new(omega.x, omega.y, omega.z, v.x, v.y, v.z))
    }

    pub fn zero() -> Self {
        Self(Vec6::zeros())
    }

    pub fn omega(&self) -> Vec3 {
        self.0.fixed_rows::<3>(0).into_owned()
    }

    pub fn v(&self) -> Vec3 {
        self.0.fixed_rows::<3>(3).into_owned()
    }

    /// The increment `hV` as a twist.
    pub fn integrate(&self, h: f64) -> Twist {
        Twist(self.0 * h)
    }
}

impl From<Vec6> for Velocity {
    fn from(v: Vec6) -> Self {
        Self(v)
    }
}
