//! Bivectors as skew matrices and their normal form under rotations.
//!
//! A bivector `A = sum_{i<j} a_ij e_i e_j` is identified with the rotation
//! generator `S_A = sum a_ij (e_j e_i^T - e_i e_j^T)`, so `e_i ∧ e_j` turns
//! `e_i` toward `e_j`. With this convention the adjoint action on vectors is
//! `[A, v] = 2 S_A v`, and `u ∧ w` maps to `w u^T - u w^T`.

use nalgebra::{DMatrix, DVector};

use super::blade::BladeIndex;
use super::multivector::MultiVector;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Rotation generator of a pure bivector.
pub fn skew_matrix<T: Real>(a: &MultiVector<T>) -> Result<DMatrix<T>> {
    a.require_grade(2)?;
    let r = a.rank();
    let mut s = DMatrix::zeros(r, r);
    for (blade, c) in a.terms() {
        let mut ix = blade.indices();
        let (i, j) = (ix.next().unwrap() - 1, ix.next().unwrap() - 1);
        s[(j, i)] += *c;
        s[(i, j)] -= *c;
    }
    Ok(s)
}

/// Inverse of [`skew_matrix`]; reads the strictly lower triangle.
pub fn bivector_from_skew<T: Real>(s: &DMatrix<T>) -> Result<MultiVector<T>> {
    let r = s.nrows();
    let mut entries = Vec::with_capacity(r * (r - 1) / 2);
    for i in 0..r {
        for j in i + 1..r {
            let c = (s[(j, i)] - s[(i, j)]) * T::lit(0.5);
            entries.push((BladeIndex::from_mask((1 << i) | (1 << j)), c));
        }
    }
    MultiVector::from_terms(r, entries)
}

/// `u ∧ w` for column vectors.
pub fn wedge_vectors<T: Real>(u: &DVector<T>, w: &DVector<T>) -> Result<MultiVector<T>> {
    if u.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), actual: w.len() });
    }
    let r = u.len();
    let mut entries = Vec::with_capacity(r * (r - 1) / 2);
    for i in 0..r {
        for j in i + 1..r {
            entries.push((BladeIndex::from_mask((1 << i) | (1 << j)), u[i] * w[j] - u[j] * w[i]));
        }
    }
    MultiVector::from_terms(r, entries)
}

/// Lexicographic `(i, j)` coefficient vector of a bivector (Plücker
/// coordinates when the bivector is decomposable).
pub fn bivector_coordinates<T: Real>(a: &MultiVector<T>) -> DVector<T> {
    let r = a.rank();
    let mut out = DVector::zeros(r * (r - 1) / 2);
    let mut k = 0;
    for i in 1..=r {
        for j in i + 1..=r {
            out[k] = a.bivector_coefficient(i, j);
            k += 1;
        }
    }
    out
}

pub fn bivector_from_coordinates<T: Real>(rank: usize, coords: &DVector<T>) -> Result<MultiVector<T>> {
    let expected = rank * (rank - 1) / 2;
    if coords.len() != expected {
        return Err(Error::DimensionMismatch { expected, actual: coords.len() });
    }
    let mut entries = Vec::with_capacity(expected);
    let mut k = 0;
    for i in 0..rank {
        for j in i + 1..rank {
            entries.push((BladeIndex::from_mask((1 << i) | (1 << j)), coords[k]));
            k += 1;
        }
    }
    MultiVector::from_terms(rank, entries)
}

/// Rotate a bivector by an orthogonal matrix: `(R u) ∧ (R w)` on blades.
pub fn rotate_bivector<T: Real>(rotation: &DMatrix<T>, a: &MultiVector<T>) -> Result<MultiVector<T>> {
    let s = skew_matrix(a)?;
    bivector_from_skew(&(rotation * s * rotation.transpose()))
}

/// Normal form `A = sum_i a_i f_{2i-1} ∧ f_{2i}` in an oriented orthonormal
/// frame `f`.
#[derive(Clone, Debug)]
pub struct CanonicalBivector<T> {
    /// `(a_i, (2i-1, 2i))` for every nonzero block, largest `|a_i|` first.
    pub blocks: Vec<(T, (usize, usize))>,
    /// Columns are the oriented frame `f_1 .. f_r`.
    pub frame: DMatrix<T>,
    /// Frobenius norm of `S_A` minus its reconstruction from the blocks.
    pub residual: T,
}

impl<T: Real> CanonicalBivector<T> {
    pub fn magnitudes(&self) -> Vec<T> {
        self.blocks.iter().map(|(a, _)| a.abs()).collect()
    }
}

/// Normal form of a floating bivector via the spectral decomposition of
/// `-S_A^2 = S_A^T S_A`, whose eigenvalues are the `a_i^2` in pairs.
pub fn canonical_bivector_form<T: Real>(a: &MultiVector<T>) -> Result<CanonicalBivector<T>> {
    let s = skew_matrix(a)?;
    let r = s.nrows();
    let scale = s.norm().max(T::one());
    let gram = s.transpose() * &s;
    let eps = T::default_epsilon();
    let eigen = nalgebra::SymmetricEigen::try_new(gram, eps, 10_000)
        .ok_or(Error::Spectral { residual: f64::NAN })?;

    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| eigen.eigenvalues[j].partial_cmp(&eigen.eigenvalues[i]).unwrap());

    let zero_level = T::lit(1e-9) * scale;
    let mut frame: Vec<DVector<T>> = Vec::with_capacity(r);
    let mut blocks = Vec::new();
    let mut kernel_start = 0;
    for &k in &order {
        if eigen.eigenvalues[k].max(T::zero()).sqrt() <= zero_level {
            break;
        }
        kernel_start += 1;
        let Some(u) = orthogonalize(eigen.eigenvectors.column(k).into_owned(), &frame) else {
            continue;
        };
        let su = &s * &u;
        let lambda = su.norm();
        if lambda <= zero_level {
            continue;
        }
        let w = su / lambda;
        frame.push(u);
        frame.push(w);
        blocks.push(lambda);
    }
    let kernel_first = frame.len();
    for &k in order.iter().skip(kernel_start) {
        if let Some(v) = orthogonalize(eigen.eigenvectors.column(k).into_owned(), &frame) {
            frame.push(v);
        }
    }
    for i in 0..r {
        if frame.len() == r {
            break;
        }
        let mut e = DVector::zeros(r);
        e[i] = T::one();
        if let Some(v) = orthogonalize(e, &frame) {
            frame.push(v);
        }
    }
    if frame.len() != r {
        return Err(Error::Spectral { residual: f64::NAN });
    }

    let mut f = DMatrix::from_columns(&frame);
    let mut signed: Vec<T> = blocks.clone();
    if f.determinant() < T::zero() {
        if kernel_first < r {
            let mut last = f.column_mut(r - 1);
            last.neg_mut();
        } else {
            // Even rank with no kernel: swap the last pair, negating its block.
            let m = blocks.len() - 1;
            f.swap_columns(2 * m, 2 * m + 1);
            signed[m] = -signed[m];
        }
    }

    let mut rebuilt = DMatrix::zeros(r, r);
    for (i, a_i) in signed.iter().enumerate() {
        let u = f.column(2 * i);
        let w = f.column(2 * i + 1);
        rebuilt += (w * u.transpose() - u * w.transpose()) * *a_i;
    }
    let residual = (&s - rebuilt).norm();
    if residual > T::lit(1e-8) * scale {
        return Err(Error::Spectral { residual: residual.to_f64_lossy() });
    }
    Ok(CanonicalBivector {
        blocks: signed.into_iter().enumerate().map(|(i, a)| (a, (2 * i + 1, 2 * i + 2))).collect(),
        frame: f,
        residual,
    })
}

/// Two passes of Gram–Schmidt against `basis`; `None` when the remainder is
/// too small to normalize reliably.
pub(crate) fn orthogonalize<T: Real>(mut v: DVector<T>, basis: &[DVector<T>]) -> Option<DVector<T>> {
    let original = v.norm();
    for _ in 0..2 {
        for b in basis {
            let c = b.dot(&v);
            v.axpy(-c, b, T::one());
        }
    }
    let n = v.norm();
    if n <= T::lit(1e-6) * original.max(T::one()) || n == T::zero() {
        return None;
    }
    Some(v / n)
}
