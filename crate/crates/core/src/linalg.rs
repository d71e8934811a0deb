//! Small dense helpers on top of nalgebra used across the numeric modules.

use nalgebra::{DMatrix, DVector};

use crate::scalar::Real;

/// `<A, B> = tr(A^T B)`.
pub fn trace_inner<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> T {
    a.iter().zip(b.iter()).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

pub fn commutator<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    a * b - b * a
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(m: &DMatrix<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    m.clone().singular_values().iter().fold(T::zero(), |acc, s| acc.max(*s))
}

pub fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

pub fn max_abs_vec<T: Real>(v: &DVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

/// `max |M^T M - I|`.
pub fn orthogonality_defect<T: Real>(m: &DMatrix<T>) -> T {
    let n = m.ncols();
    max_abs(&(m.transpose() * m - DMatrix::identity(n, n)))
}

/// `exp(G)` together with the directional derivative
/// `d/ds exp(G + sH)|_{s=0}`, read off the block exponential
/// `exp([[G, H], [0, G]]) = [[exp G, D], [0, exp G]]`.
pub fn exp_with_derivative<T: Real>(g: &DMatrix<T>, h: &DMatrix<T>) -> (DMatrix<T>, DMatrix<T>) {
    let n = g.nrows();
    let mut block = DMatrix::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(g);
    block.view_mut((n, n), (n, n)).copy_from(g);
    block.view_mut((0, n), (n, n)).copy_from(h);
    let e = block.exp();
    (e.view((0, 0), (n, n)).into_owned(), e.view((0, n), (n, n)).into_owned())
}

/// Block-diagonal direct sum of `copies` copies of `m`.
pub fn direct_sum<T: Real>(m: &DMatrix<T>, copies: usize) -> DMatrix<T> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(n * copies, n * copies);
    for c in 0..copies {
        out.view_mut((c * n, c * n), (n, n)).copy_from(m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_exponential_derivative_matches_finite_difference() {
        let g = DMatrix::from_row_slice(3, 3, &[0.0, -0.3, 0.2, 0.3, 0.0, -0.5, -0.2, 0.5, 0.0]);
        let h = DMatrix::from_row_slice(3, 3, &[0.0, 0.1, 0.0, -0.1, 0.0, 0.4, 0.0, -0.4, 0.0]);
        let (e, d) = exp_with_derivative(&g, &h);
        assert!((&e - g.clone().exp()).norm() < 1e-14);
        let s = 1e-6;
        let fd = ((&g + &h * s).exp() - (&g - &h * s).exp()) / (2.0 * s);
        assert!((d - fd).norm() < 1e-9);
    }

    #[test]
    fn spectral_norm_of_rotation_is_one() {
        let r = DMatrix::from_row_slice(2, 2, &[0.6, -0.8, 0.8, 0.6]);
        assert!((spectral_norm(&r) - 1.0f64).abs() < 1e-14);
        assert!(orthogonality_defect(&r) < 1e-15);
    }
}
