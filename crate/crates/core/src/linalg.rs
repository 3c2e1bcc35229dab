//! Small dense helpers shared by the statistics and filter code.

use nalgebra::{DMatrix, SMatrix, SymmetricEigen};

/// Relative size, against the largest diagonal entry, below which a Cholesky
/// pivot is treated as an exact zero.
pub const PIVOT_TOL: f64 = 64.0 * f64::EPSILON;

/// `(m + mᵀ) / 2`
pub fn symmetrize<const D: usize>(m: &SMatrix<f64, D, D>) -> SMatrix<f64, D, D> {
    (m + m.transpose()) * 0.5
}

/// Lower-triangular `L` with `LLᵀ = m` for symmetric positive semi-definite `m`.
///
/// Pivots within `PIVOT_TOL · max diag(m)` of zero produce a zero column
/// instead of a failure, so rank-deficient covariances (for instance an
/// exactly zero block) factor without adding jitter. Returns `None` when a
/// pivot is clearly negative, meaning `m` is indefinite.
pub fn psd_cholesky<const D: usize>(m: &SMatrix<f64, D, D>) -> Option<SMatrix<f64, D, D>> {
    let scale = (0..D).map(|i| m[(i, i)]).fold(0.0_f64, f64::max);
    if !scale.is_finite() {
        return None;
    }
    let tol = PIVOT_TOL * scale;
    let mut l = SMatrix::<f64, D, D>::zeros();
    for j in 0..D {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d > tol {
            let pivot = d.sqrt();
            l[(j, j)] = pivot;
            for i in (j + 1)..D {
                let mut s = m[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / pivot;
            }
        } else if d < -tol {
            return None;
        }
    }
    Some(l)
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue<const D: usize>(m: &SMatrix<f64, D, D>) -> f64 {
    let sym = symmetrize(m);
    SymmetricEigen::new(DMatrix::from_column_slice(D, D, sym.as_slice()))
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `diag(a, b)`
pub fn block_diag<const A: usize, const B: usize, const C: usize>(
    a: &SMatrix<f64, A, A>,
    b: &SMatrix<f64, B, B>,
) -> SMatrix<f64, C, C> {
    assert_eq!(A + B, C, "block sizes must add up");
    let mut m = SMatrix::<f64, C, C>::zeros();
    m.generic_view_mut((0, 0), (nalgebra::Const::<A>, nalgebra::Const::<A>))
        .copy_from(a);
    m.generic_view_mut((A, A), (nalgebra::Const::<B>, nalgebra::Const::<B>))
        .copy_from(b);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix3, Matrix6};

    #[test]
    fn factors_positive_definite() {
        let a = Matrix3::new(4.0, 2.0, 0.6, 2.0, 5.0, 1.0, 0.6, 1.0, 3.0);
        let l = psd_cholesky(&a).unwrap();
        assert!((l * l.transpose() - a).amax() < 1e-14);
        assert_eq!(
            l.upper_triangle() - Matrix3::from_diagonal(&l.diagonal()),
            Matrix3::zeros()
        );
    }

    #[test]
    fn factors_semidefinite_blocks() {
        let a = block_diag::<3, 3, 6>(&Matrix3::zeros(), &(Matrix3::identity() * 2.0));
        let l = psd_cholesky(&a).unwrap();
        assert!((l * l.transpose() - a).amax() < 1e-15);
        assert_eq!(
            psd_cholesky(&Matrix6::<f64>::zeros()).unwrap(),
            Matrix6::zeros()
        );
    }

    #[test]
    fn rejects_indefinite() {
        let a = Matrix3::from_diagonal(&nalgebra::Vector3::new(1.0, -0.1, 1.0));
        assert!(psd_cholesky(&a).is_none());
        assert!(min_eigenvalue(&a) < -0.09);
    }
}
