//! Matrix realizations of the even Clifford algebra `Cl_r^0` and the
//! endomorphism family `J_ij = φ(e_i e_j)`.
//!
//! `Cl_r^0` is generated by `f_s = e_s e_r` (`s < r`), which satisfy
//! `f_s^2 = -1` and anticommute, so `Cl_r^0 ≅ Cl_{0,r-1}`. Given gamma
//! matrices `γ_s` for the latter,
//!
//! * `J_sr = φ(f_s) = γ_s`,
//! * `J_st = φ(e_s e_t) = +γ_s γ_t` for `s < t < r`, because
//!   `f_s f_t = e_s e_r e_t e_r = -e_s e_t e_r e_r = e_s e_t`.

mod file;
mod gamma;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::clifford::{skew_matrix, BladeIndex, MultiVector};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, orthogonality_defect, trace_inner};
use crate::scalar::Real;

pub use file::{parse_rep_file, write_rep_file};
pub use gamma::{bott_dimension, gamma_matrices};

pub const MIN_RANK: usize = 3;
pub const MAX_RANK: usize = 16;

/// Dimension of the irreducible `Cl_r^0` module, from the gamma
/// construction. Defined for `2 ≤ r ≤ 16`.
pub fn irreducible_dimension(rank: usize) -> Option<usize> {
    (2..=MAX_RANK).contains(&rank).then(|| bott_dimension(rank - 1))
}

/// `r ↦ N0(r)` for `r = 2..=16`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionTable {
    entries: Vec<(usize, usize)>,
}

impl DimensionTable {
    /// Builds every gamma family and records its size.
    pub fn compute() -> Self {
        let entries = (2..=MAX_RANK).map(|r| (r, gamma_matrices(r - 1)[0].nrows())).collect();
        DimensionTable { entries }
    }

    pub fn get(&self, rank: usize) -> Option<usize> {
        self.entries.iter().find(|(r, _)| *r == rank).map(|(_, n)| *n)
    }

    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }
}

/// Row structure of a matrix with exactly one nonzero entry per row.
#[derive(Clone, Debug)]
struct Monomial<T> {
    rows: Vec<(usize, T)>,
}

impl<T: Real> Monomial<T> {
    fn detect(m: &DMatrix<T>) -> Option<Self> {
        let mut rows = Vec::with_capacity(m.nrows());
        for i in 0..m.nrows() {
            let mut hit = None;
            for j in 0..m.ncols() {
                if m[(i, j)] != T::zero() {
                    if hit.is_some() {
                        return None;
                    }
                    hit = Some((j, m[(i, j)]));
                }
            }
            rows.push(hit?);
        }
        Some(Monomial { rows })
    }

    /// `self * b`, as a row gather.
    fn mul(&self, b: &DMatrix<T>) -> DMatrix<T> {
        DMatrix::from_fn(self.rows.len(), b.ncols(), |i, c| {
            let (j, s) = self.rows[i];
            b[(j, c)] * s
        })
    }
}

/// A representation of `Cl_r^0` on `R^n`, `n = N0(r) · m`.
#[derive(Clone, Debug)]
pub struct CliffordRep<T> {
    rank: usize,
    multiplicity: usize,
    irreducible_dim: usize,
    matrices: Vec<DMatrix<T>>,
    monomials: Vec<Option<Monomial<T>>>,
    injective: bool,
}

/// Maximum residuals of the `J_ij` axioms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepInvariants<T> {
    pub skew: T,
    pub orthogonal: T,
    pub square: T,
    /// `J_ij J_ik - J_jk` over distinct `i, j, k`.
    pub composition: T,
    /// `[J_ij, J_kl]` for disjoint pairs.
    pub commutation: T,
    /// `{J_ij, J_ik}` for `j ≠ k`.
    pub anticommutation: T,
}

impl<T: Real> RepInvariants<T> {
    pub fn max(&self) -> T {
        [self.skew, self.orthogonal, self.square, self.composition, self.commutation, self.anticommutation]
            .into_iter()
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// `(R_E, R_T)` with `R_T J_ij R_T^{-1} = φ(R_E e_i ∧ R_E e_j)`.
#[derive(Clone, Debug)]
pub struct SpinRotation<T> {
    /// Rotation of `R^r`.
    pub frame: DMatrix<T>,
    /// Lift acting on `R^n`.
    pub spin: DMatrix<T>,
    /// Frobenius norm of `t φ(A)`; the exponential cost grows with it.
    pub generator_norm: T,
}

/// Lexicographic position of `(i, j)`, `1 ≤ i < j ≤ r`.
fn pair_position(rank: usize, i: usize, j: usize) -> usize {
    (i - 1) * (2 * rank - i) / 2 + (j - i - 1)
}

/// All pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn pairs(rank: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=rank).flat_map(move |i| (i + 1..=rank).map(move |j| (i, j)))
}

/// Integer `J_ij` of the irreducible module, in [`pairs`] order.
fn irreducible_family(rank: usize) -> Vec<gamma::IntMatrix> {
    let gammas = gamma_matrices(rank - 1);
    pairs(rank)
        .map(|(s, t)| if t == rank { gammas[s - 1].clone() } else { &gammas[s - 1] * &gammas[t - 1] })
        .collect()
}

/// Builds the representation of rank `r` and multiplicity `m` as the direct
/// sum of `m` copies of the irreducible one.
pub fn build_rep<T: Real>(rank: usize, multiplicity: usize) -> Result<CliffordRep<T>> {
    if !(MIN_RANK..=MAX_RANK).contains(&rank) {
        return Err(Error::UnsupportedRank { rank, reason: "supported ranks are 3..=16" });
    }
    if multiplicity == 0 {
        return Err(Error::InvalidMultiplicity(multiplicity));
    }
    let block = gamma::IntMatrix::identity(multiplicity, multiplicity);
    let matrices = irreducible_family(rank)
        .iter()
        .map(|j| block.kronecker(j).map(|x| T::from_i32(x).expect("small integer")))
        .collect();
    CliffordRep::from_matrices(rank, multiplicity, matrices)
}

impl<T: Real> CliffordRep<T> {
    /// Wraps an explicit `J` family (lexicographic pair order). Only shapes
    /// are validated here; see [`CliffordRep::invariants`].
    pub fn from_matrices(rank: usize, multiplicity: usize, matrices: Vec<DMatrix<T>>) -> Result<Self> {
        if !(2..=MAX_RANK).contains(&rank) {
            return Err(Error::UnsupportedRank { rank, reason: "supported ranks are 2..=16" });
        }
        if multiplicity == 0 {
            return Err(Error::InvalidMultiplicity(multiplicity));
        }
        let expected = rank * (rank - 1) / 2;
        if matrices.len() != expected {
            return Err(Error::DimensionMismatch { expected, actual: matrices.len() });
        }
        let n = matrices[0].nrows();
        if !n.is_multiple_of(multiplicity) {
            return Err(Error::InvalidMultiplicity(multiplicity));
        }
        for m in &matrices {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, actual: m.nrows().max(m.ncols()) });
            }
        }
        let monomials = matrices.iter().map(Monomial::detect).collect();
        let mut rep = CliffordRep {
            rank,
            multiplicity,
            irreducible_dim: n / multiplicity,
            matrices,
            monomials,
            injective: false,
        };
        rep.injective = rep.gram_min_eigenvalue() > T::lit(1e-9);
        Ok(rep)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    /// Representation dimension `n`.
    pub fn dim(&self) -> usize {
        self.irreducible_dim * self.multiplicity
    }

    pub fn irreducible_dim(&self) -> usize {
        self.irreducible_dim
    }

    pub fn pair_count(&self) -> usize {
        self.matrices.len()
    }

    /// The family in lexicographic pair order.
    pub fn matrices(&self) -> &[DMatrix<T>] {
        &self.matrices
    }

    /// Whether `φ` is injective on bivectors (Gram matrix of the family is
    /// nonsingular).
    pub fn is_injective(&self) -> bool {
        self.injective
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.rank {
            return Err(Error::IndexOutOfRange { index: i, rank: self.rank });
        }
        Ok(())
    }

    /// `J_ij` for `i < j`; `J_ji = -J_ij`.
    pub fn j(&self, i: usize, j: usize) -> Result<DMatrix<T>> {
        self.check_index(i)?;
        self.check_index(j)?;
        match i.cmp(&j) {
            std::cmp::Ordering::Less => Ok(self.matrices[pair_position(self.rank, i, j)].clone()),
            std::cmp::Ordering::Greater => Ok(-&self.matrices[pair_position(self.rank, j, i)]),
            std::cmp::Ordering::Equal => Err(Error::NotPureGrade { expected: 2 }),
        }
    }

    /// `J_ij` for `i < j` without copying.
    pub fn j_ref(&self, i: usize, j: usize) -> &DMatrix<T> {
        assert!(0 < i && i < j && j <= self.rank, "pair ({i}, {j}) outside 1 ≤ i < j ≤ {}", self.rank);
        &self.matrices[pair_position(self.rank, i, j)]
    }

    fn product(&self, k: usize, b: &DMatrix<T>) -> DMatrix<T> {
        match &self.monomials[k] {
            Some(m) => m.mul(b),
            None => &self.matrices[k] * b,
        }
    }

    /// `Σ a_ij J_ij`.
    pub fn phi(&self, a: &MultiVector<T>) -> Result<DMatrix<T>> {
        a.require_grade(2)?;
        if a.rank() != self.rank {
            return Err(Error::RankMismatch { left: a.rank(), right: self.rank });
        }
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for (blade, c) in a.terms() {
            let mut ix = blade.indices();
            let (i, j) = (ix.next().unwrap(), ix.next().unwrap());
            out += self.j_ref(i, j) * *c;
        }
        Ok(out)
    }

    /// `Σ a_k J_k` from lexicographic coordinates.
    pub fn phi_coordinates(&self, coords: &[T]) -> Result<DMatrix<T>> {
        if coords.len() != self.pair_count() {
            return Err(Error::DimensionMismatch { expected: self.pair_count(), actual: coords.len() });
        }
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for (m, c) in self.matrices.iter().zip(coords) {
            if *c != T::zero() {
                out += m * *c;
            }
        }
        Ok(out)
    }

    /// Gram matrix `<J_a, J_b>` under the trace inner product.
    pub fn gram(&self) -> DMatrix<T> {
        let p = self.pair_count();
        let mut g = DMatrix::zeros(p, p);
        for a in 0..p {
            for b in a..p {
                let v = trace_inner(&self.matrices[a], &self.matrices[b]);
                g[(a, b)] = v;
                g[(b, a)] = v;
            }
        }
        g
    }

    /// Smallest eigenvalue of the Gram matrix divided by `n`.
    pub fn gram_min_eigenvalue(&self) -> T {
        let g = self.gram() / T::from_usize(self.dim()).unwrap();
        SymmetricEigen::new(g).eigenvalues.iter().fold(T::max_value().unwrap(), |a, b| a.min(*b))
    }

    /// Coefficients `a_ij = <M, J_ij> / <J_ij, J_ij>`, accepted only when
    /// `max|M - φ(A)| ≤ tolerance · max(1, max|M|)`.
    pub fn phi_inverse(&self, m: &DMatrix<T>, tolerance: T) -> Result<MultiVector<T>> {
        if !self.injective {
            return Err(Error::HypothesisNotMet(format!(
                "φ is not injective on bivectors at rank {}",
                self.rank
            )));
        }
        let n = self.dim();
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: m.nrows() });
        }
        let coords: Vec<T> = self
            .matrices
            .iter()
            .map(|j| trace_inner(m, j) / trace_inner(j, j))
            .collect();
        let residual = max_abs(&(m - self.phi_coordinates(&coords)?));
        if residual > tolerance * max_abs(m).max(T::one()) {
            return Err(Error::NotInSpan { residual: residual.to_f64_lossy() });
        }
        let terms = pairs(self.rank)
            .zip(coords)
            .map(|((i, j), c)| (BladeIndex::from_mask((1 << (i - 1)) | (1 << (j - 1))), c));
        MultiVector::from_terms(self.rank, terms)
    }

    /// `R_E = exp(2t S_A)` on `R^r` and `R_T = exp(t φ(A))` on `R^n`.
    pub fn spin_rotate(&self, a: &MultiVector<T>, t: T) -> Result<SpinRotation<T>> {
        let generator = self.phi(a)? * t;
        let frame = (skew_matrix(a)? * (t + t)).exp();
        let generator_norm = generator.norm();
        let spin = generator.exp();
        Ok(SpinRotation { frame, spin, generator_norm })
    }

    /// A spin lift `L` of an oriented orthonormal frame `F ∈ SO(r)`, with
    /// `L J_ij L^T = φ(F e_i ∧ F e_j)`.
    ///
    /// `F` is factored into plane rotations by Givens elimination, and each
    /// rotation by `θ` in the `(p, q)` plane lifts to
    /// `cos(θ/2) I + sin(θ/2) J_pq`.
    pub fn spin_lift(&self, frame: &DMatrix<T>) -> Result<DMatrix<T>> {
        let r = self.rank;
        if frame.nrows() != r || frame.ncols() != r {
            return Err(Error::DimensionMismatch { expected: r, actual: frame.nrows() });
        }
        let defect = orthogonality_defect(frame);
        if defect > T::lit(1e-8) || frame.determinant() < T::zero() {
            return Err(Error::DegeneratePoint(format!(
                "frame is not in SO({r}) (orthogonality defect {:e})",
                defect.to_f64_lossy()
            )));
        }
        let mut work = frame.clone();
        let mut steps = Vec::new();
        for p in 0..r.saturating_sub(1) {
            for q in p + 1..r {
                let (a, b) = (work[(p, p)], work[(q, p)]);
                let theta = -b.atan2(a);
                if theta == T::zero() {
                    continue;
                }
                let (s, c) = theta.sin_cos();
                for col in 0..r {
                    let (x, y) = (work[(p, col)], work[(q, col)]);
                    work[(p, col)] = c * x - s * y;
                    work[(q, col)] = s * x + c * y;
                }
                steps.push((p + 1, q + 1, theta));
            }
        }
        // F = G_1^T G_2^T ⋯ with each G_k^T a rotation by -θ_k.
        let n = self.dim();
        let half = T::lit(0.5);
        let mut lift = DMatrix::identity(n, n);
        for &(p, q, theta) in &steps {
            let (s, c) = (-theta * half).sin_cos();
            let factor = DMatrix::identity(n, n) * c + self.j_ref(p, q) * s;
            lift *= factor;
        }
        Ok(lift)
    }

    /// Residuals of every `J_ij` axiom, evaluated in parallel over pairs.
    pub fn invariants(&self) -> RepInvariants<T> {
        let r = self.rank;
        let n = self.dim();
        let id = DMatrix::<T>::identity(n, n);
        let pos = |i: usize, j: usize| pair_position(r, i, j);
        let signed = |i: usize, j: usize| -> (usize, T) {
            if i < j {
                (pos(i, j), T::one())
            } else {
                (pos(j, i), -T::one())
            }
        };

        let per_pair: Vec<[T; 6]> = pairs(r)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&(i, j)| {
                let k0 = pos(i, j);
                let m = &self.matrices[k0];
                let skew = max_abs(&(m + m.transpose()));
                let orthogonal = orthogonality_defect(m);
                let square = max_abs(&(self.product(k0, m) + &id));
                let mut composition = T::zero();
                let mut commutation = T::zero();
                let mut anticommutation = T::zero();
                for k in 1..=r {
                    if k == i || k == j {
                        continue;
                    }
                    // J_ij J_ik = J_jk and J_ji J_jk = J_ik (covers both orderings).
                    let (ik, sik) = signed(i, k);
                    let (jk, sjk) = signed(j, k);
                    let lhs = self.product(k0, &self.matrices[ik]) * sik;
                    composition = composition.max(max_abs(&(lhs - &self.matrices[jk] * sjk)));
                    let lhs = self.product(k0, &self.matrices[jk]) * (-sjk);
                    composition = composition.max(max_abs(&(lhs - &self.matrices[ik] * sik)));
                    for a in [ik, jk] {
                        let anti = self.product(k0, &self.matrices[a]) + self.product(a, m);
                        anticommutation = anticommutation.max(max_abs(&anti));
                    }
                    for l in k + 1..=r {
                        if l == i || l == j {
                            continue;
                        }
                        let kl = pos(k, l);
                        let comm = self.product(k0, &self.matrices[kl]) - self.product(kl, m);
                        commutation = commutation.max(max_abs(&comm));
                    }
                }
                [skew, orthogonal, square, composition, commutation, anticommutation]
            })
            .collect();

        let fold = |idx: usize| per_pair.iter().fold(T::zero(), |a, v| a.max(v[idx]));
        RepInvariants {
            skew: fold(0),
            orthogonal: fold(1),
            square: fold(2),
            composition: fold(3),
            commutation: fold(4),
            anticommutation: fold(5),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{geometric_product, rotate_bivector, squares_to_minus_one};
    use crate::clifford::wedge_vectors;
    use crate::sampling::{gaussian_bivector, random_rotation, stream, unit_vector};

    #[test]
    fn dimension_table_matches_known_ranks() {
        let table = DimensionTable::compute();
        let expected = [
            (2, 2), (3, 4), (4, 4), (5, 8), (6, 8), (7, 8), (8, 8), (9, 16),
            (10, 32), (11, 64), (12, 64), (13, 128), (14, 128), (15, 128), (16, 128),
        ];
        assert_eq!(table.entries(), &expected);
        for (r, n) in expected {
            assert_eq!(irreducible_dimension(r), Some(n));
        }
    }

    #[test]
    fn rank_three_is_quaternionic() {
        let rep = build_rep::<f64>(3, 1).unwrap();
        assert_eq!(rep.dim(), 4);
        let (j12, j13, j23) = (rep.j(1, 2).unwrap(), rep.j(1, 3).unwrap(), rep.j(2, 3).unwrap());
        assert_eq!(&j12 * &j13, j23);
        assert_eq!(&j12 * &j13 + &j13 * &j12, DMatrix::zeros(4, 4));
        assert_eq!(&j12 * &j23 + &j23 * &j12, DMatrix::zeros(4, 4));
        assert_eq!(&j13 * &j23 + &j23 * &j13, DMatrix::zeros(4, 4));
    }

    #[test]
    fn invariants_hold_exactly() {
        for r in [3, 4, 5, 6, 7, 8, 9, 10] {
            for m in [1, 2] {
                let rep = build_rep::<f64>(r, m).unwrap();
                assert_eq!(rep.invariants().max(), 0.0, "r = {r}, m = {m}");
            }
        }
    }

    #[test]
    fn phi_preserves_commutators() {
        let rep = build_rep::<f64>(6, 1).unwrap();
        let mut rng = stream(1, "morphism");
        for _ in 0..20 {
            let a = gaussian_bivector::<f64, _>(&mut rng, 6);
            let b = gaussian_bivector::<f64, _>(&mut rng, 6);
            let ab = geometric_product(&a, &b).unwrap();
            let ba = geometric_product(&b, &a).unwrap();
            let bracket = ab.try_sub(&ba).unwrap().grade_part(2);
            let (pa, pb) = (rep.phi(&a).unwrap(), rep.phi(&b).unwrap());
            let lhs = &pa * &pb - &pb * &pa;
            assert!(max_abs(&(lhs - rep.phi(&bracket).unwrap())) < 1e-12);
        }
    }

    #[test]
    fn injectivity_fails_only_at_rank_four() {
        for r in 3..=10 {
            let rep = build_rep::<f64>(r, 1).unwrap();
            assert_eq!(rep.is_injective(), r != 4, "r = {r}");
        }
        let rep = build_rep::<f64>(4, 1).unwrap();
        let j12 = rep.j(1, 2).unwrap();
        let j34 = rep.j(3, 4).unwrap();
        assert!((&j12 - &j34).iter().all(|x| *x == 0.0) || (&j12 + &j34).iter().all(|x| *x == 0.0));
    }

    #[test]
    fn phi_inverse_examples() {
        let rep = build_rep::<f64>(5, 1).unwrap();
        let a = rep.phi_inverse(&rep.j(1, 2).unwrap(), 1e-12).unwrap();
        assert_eq!(a, MultiVector::blade(5, &[1, 2], 1.0).unwrap());
        let m = rep.j(1, 3).unwrap() * 2.0 - rep.j(2, 4).unwrap();
        let a = rep.phi_inverse(&m, 1e-12).unwrap();
        let expected = MultiVector::bivector(5, [(1, 3, 2.0), (2, 4, -1.0)]).unwrap();
        assert_eq!(a, expected);
        let err = rep.phi_inverse(&DMatrix::identity(8, 8), 1e-12).unwrap_err();
        assert!(matches!(err, Error::NotInSpan { .. }));
    }

    #[test]
    fn phi_of_unit_decomposable_squares_to_minus_identity() {
        let rep = build_rep::<f64>(7, 2).unwrap();
        let mut rng = stream(3, "phi-square");
        for _ in 0..100 {
            let u = unit_vector::<f64, _>(&mut rng, 7);
            let mut w = unit_vector::<f64, _>(&mut rng, 7);
            w -= &u * u.dot(&w);
            w /= w.norm();
            let a = wedge_vectors(&u, &w).unwrap();
            assert!(squares_to_minus_one(&a, &1e-12).unwrap());
            let p = rep.phi(&a).unwrap();
            assert!(max_abs(&(&p * &p + DMatrix::identity(16, 16))) < 1e-12);
        }
    }

    #[test]
    fn spin_rotate_is_equivariant() {
        let rep = build_rep::<f64>(6, 1).unwrap();
        let mut rng = stream(5, "spin-rotate");
        for _ in 0..20 {
            let a = gaussian_bivector::<f64, _>(&mut rng, 6);
            let t = crate::sampling::gaussian::<f64, _>(&mut rng);
            let rot = rep.spin_rotate(&a, t).unwrap();
            for (i, j) in pairs(6) {
                let lhs = &rot.spin * rep.j_ref(i, j) * rot.spin.transpose();
                let e = MultiVector::blade(6, &[i, j], 1.0).unwrap();
                let rhs = rep.phi(&rotate_bivector(&rot.frame, &e).unwrap()).unwrap();
                assert!(max_abs(&(lhs - rhs)) < 1e-9);
            }
        }
    }

    #[test]
    fn spin_rotate_quarter_turn_example() {
        let rep = build_rep::<f64>(5, 1).unwrap();
        let a = MultiVector::blade(5, &[1, 2], 1.0).unwrap();
        let rot = rep.spin_rotate(&a, std::f64::consts::FRAC_PI_2).unwrap();
        let e13 = MultiVector::blade(5, &[1, 3], 1.0).unwrap();
        let rotated = rotate_bivector(&rot.frame, &e13).unwrap();
        let lhs = &rot.spin * rep.j_ref(1, 3) * rot.spin.transpose();
        assert!(max_abs(&(lhs - rep.phi(&rotated).unwrap())) < 1e-10);
        let zero = rep.spin_rotate(&a, 0.0).unwrap();
        assert_eq!(zero.spin, DMatrix::identity(8, 8));
        assert_eq!(zero.frame, DMatrix::identity(5, 5));
    }

    #[test]
    fn spin_lift_covers_random_frames() {
        for (r, m) in [(3, 1), (5, 2), (9, 1)] {
            let rep = build_rep::<f64>(r, m).unwrap();
            let mut rng = stream(r as u64, "spin-lift");
            let f = random_rotation::<f64, _>(&mut rng, r);
            let lift = rep.spin_lift(&f).unwrap();
            assert!(orthogonality_defect(&lift) < 1e-12);
            for (i, j) in pairs(r) {
                let e = MultiVector::blade(r, &[i, j], 1.0).unwrap();
                let rhs = rep.phi(&rotate_bivector(&f, &e).unwrap()).unwrap();
                let lhs = &lift * rep.j_ref(i, j) * lift.transpose();
                assert!(max_abs(&(lhs - rhs)) < 1e-10, "r = {r}, pair ({i}, {j})");
            }
        }
    }

    #[test]
    fn rejects_out_of_range_configs() {
        assert!(matches!(build_rep::<f64>(2, 1), Err(Error::UnsupportedRank { .. })));
        assert!(matches!(build_rep::<f64>(17, 1), Err(Error::UnsupportedRank { .. })));
        assert!(matches!(build_rep::<f64>(5, 0), Err(Error::InvalidMultiplicity(0))));
    }
}
