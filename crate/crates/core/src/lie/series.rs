//! Truncated power series of the Lie-group Jacobians.
//!
//! These are reference implementations used to check the closed forms; they
//! do not share any code with them.

use nalgebra::SMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    /// `Σ adⁱ / (i+1)!`
    Jacobian,
    /// `Σ Bᵢ adⁱ / i!` with Bernoulli numbers `Bᵢ` (`B₁ = −½`).
    InverseJacobian,
}

/// Bernoulli numbers `B₀ … B_{n−1}` with the `B₁ = −½` convention.
///
/// Computed exactly in rational arithmetic from `Σ_{k≤m} C(m+1, k) B_k = 0`;
/// exact up to `n = 36`, which covers every use here.
pub fn bernoulli_numbers(n: usize) -> Vec<f64> {
    let mut b: Vec<(i128, i128)> = Vec::with_capacity(n);
    for m in 0..n {
        if m == 0 {
            b.push((1, 1));
            continue;
        }
        let mut acc = (0i128, 1i128);
        let mut binom: i128 = 1;
        for (k, &bk) in b.iter().enumerate() {
            acc = add(acc, (binom * bk.0, bk.1));
            binom = binom * (m + 1 - k) as i128 / (k + 1) as i128;
        }
        b.push(reduce(-acc.0, acc.1 * (m + 1) as i128));
    }
    b.into_iter().map(|(p, q)| p as f64 / q as f64).collect()
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs().max(1)
}

fn reduce(p: i128, q: i128) -> (i128, i128) {
    let g = gcd(p, q) * q.signum();
    (p / g, q / g)
}

fn add(a: (i128, i128), b: (i128, i128)) -> (i128, i128) {
    let g = gcd(a.1, b.1);
    reduce(a.0 * (b.1 / g) + b.0 * (a.1 / g), a.1 / g * b.1)
}

/// First `terms` terms of the Jacobian (or inverse Jacobian) series in `ad`.
///
/// With `ad = ad(u)` this is the left Jacobian `J_l(ad u)`; pass `−ad(u)` for
/// the right Jacobian. The inverse series only converges for spectral radius
/// below `2π`.
pub fn series_jacobian<const D: usize>(
    ad: &SMatrix<f64, D, D>,
    terms: usize,
    kind: SeriesKind,
) -> SMatrix<f64, D, D> {
    let mut sum = SMatrix::<f64, D, D>::zeros();
    let mut power = SMatrix::<f64, D, D>::identity();
    let bernoulli = match kind {
        SeriesKind::InverseJacobian => bernoulli_numbers(terms),
        SeriesKind::Jacobian => Vec::new(),
    };
    let mut factorial = 1.0;
    for i in 0..terms {
        let scale = match kind {
            SeriesKind::Jacobian => {
                factorial *= (i + 1) as f64;
                1.0 / factorial
            }
            SeriesKind::InverseJacobian => {
                if i > 0 {
                    factorial *= i as f64;
                }
                bernoulli[i] / factorial
            }
        };
        sum += power * scale;
        power *= ad;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_numbers(9);
        let want = [
            1.0,
            -0.5,
            1.0 / 6.0,
            0.0,
            -1.0 / 30.0,
            0.0,
            1.0 / 42.0,
            0.0,
            -1.0 / 30.0,
        ];
        assert_eq!(b, want);
        let b = bernoulli_numbers(31);
        assert_eq!(b[30], 8615841276005.0 / 14322.0);
    }

    #[test]
    fn one_and_two_terms() {
        let a = Matrix3::new(0.0, -0.3, 0.2, 0.3, 0.0, -0.1, -0.2, 0.1, 0.0);
        let id = Matrix3::identity();
        assert_eq!(series_jacobian(&a, 1, SeriesKind::Jacobian), id);
        assert_eq!(series_jacobian(&a, 1, SeriesKind::InverseJacobian), id);
        assert_eq!(series_jacobian(&a, 2, SeriesKind::Jacobian), id + a / 2.0);
        assert_eq!(
            series_jacobian(&a, 2, SeriesKind::InverseJacobian),
            id - a / 2.0
        );
    }
}
