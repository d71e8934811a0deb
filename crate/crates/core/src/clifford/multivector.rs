use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use super::blade::{BladeIndex, MAX_RANK};
use crate::error::{Error, Result};
use crate::scalar::Coefficient;

/// An element of the real Clifford algebra `Cl(r)` with `e_i^2 = -1`.
///
/// Terms are kept sparse and never store a zero coefficient. Values are
/// immutable once built; every operation returns a new multivector.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiVector<T> {
    rank: usize,
    terms: BTreeMap<BladeIndex, T>,
}

impl<T: Coefficient> MultiVector<T> {
    pub fn zero(rank: usize) -> Result<Self> {
        check_rank(rank)?;
        Ok(Self { rank, terms: BTreeMap::new() })
    }

    pub fn scalar(rank: usize, value: T) -> Result<Self> {
        let mut mv = Self::zero(rank)?;
        mv.accumulate(BladeIndex::SCALAR, value);
        Ok(mv)
    }

    /// The generator `e_i` (1-based).
    pub fn generator(rank: usize, i: usize) -> Result<Self> {
        Self::blade(rank, &[i], T::one())
    }

    /// `coefficient * e_{i1} e_{i2} ... e_{ik}` for an arbitrary index list;
    /// repeated or unsorted indices are reduced with the generator relations.
    pub fn blade(rank: usize, indices: &[usize], coefficient: T) -> Result<Self> {
        check_rank(rank)?;
        let mut blade = BladeIndex::SCALAR;
        let mut sign = 1i8;
        for &i in indices {
            if i == 0 || i > rank {
                return Err(Error::IndexOutOfRange { index: i, rank });
            }
            let (next, s) = blade.product(BladeIndex::generator(i)?);
            blade = next;
            sign *= s;
        }
        let c = if sign < 0 { -coefficient } else { coefficient };
        let mut mv = Self::zero(rank)?;
        mv.accumulate(blade, c);
        Ok(mv)
    }

    /// Bivector `sum_{i<j} a_ij e_i e_j` from `(i, j, a_ij)` triples.
    pub fn bivector<I>(rank: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let mut mv = Self::zero(rank)?;
        for (i, j, c) in entries {
            let term = Self::blade(rank, &[i, j], c)?;
            mv = mv.try_add(&term)?;
        }
        Ok(mv)
    }

    /// Build from `(blade, coefficient)` pairs; duplicate blades are summed.
    pub fn from_terms<I>(rank: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BladeIndex, T)>,
    {
        let mut mv = Self::zero(rank)?;
        for (blade, c) in terms {
            if blade.max_index() > rank {
                return Err(Error::IndexOutOfRange { index: blade.max_index(), rank });
            }
            mv.accumulate(blade, c);
        }
        Ok(mv)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (BladeIndex, &T)> {
        self.terms.iter().map(|(b, c)| (*b, c))
    }

    pub fn coefficient(&self, blade: BladeIndex) -> T {
        self.terms.get(&blade).cloned().unwrap_or_else(T::zero)
    }

    /// Coefficient of `e_i e_j` (1-based, `i < j`).
    pub fn bivector_coefficient(&self, i: usize, j: usize) -> T {
        match BladeIndex::new(&[i, j]) {
            Ok(b) => self.coefficient(b),
            Err(_) => T::zero(),
        }
    }

    pub fn scalar_part(&self) -> T {
        self.coefficient(BladeIndex::SCALAR)
    }

    pub fn grade_part(&self, grade: usize) -> Self {
        Self {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.grade() == grade)
                .map(|(b, c)| (*b, c.clone()))
                .collect(),
        }
    }

    /// True when every stored term has the given grade (the zero element is
    /// pure of every grade).
    pub fn is_pure_grade(&self, grade: usize) -> bool {
        self.terms.keys().all(|b| b.grade() == grade)
    }

    pub fn require_grade(&self, grade: usize) -> Result<()> {
        if self.is_pure_grade(grade) {
            Ok(())
        } else {
            Err(Error::NotPureGrade { expected: grade })
        }
    }

    /// Sum of squared blade coefficients.
    pub fn norm_squared(&self) -> T {
        self.terms.values().fold(T::zero(), |acc, c| acc + c.clone() * c.clone())
    }

    pub fn scale(&self, factor: &T) -> Self {
        let mut out = Self { rank: self.rank, terms: BTreeMap::new() };
        for (b, c) in &self.terms {
            out.accumulate(*b, c.clone() * factor.clone());
        }
        out
    }

    pub fn map_coefficients<U: Coefficient>(&self, f: impl Fn(&T) -> U) -> MultiVector<U> {
        let mut out = MultiVector { rank: self.rank, terms: BTreeMap::new() };
        for (b, c) in &self.terms {
            out.accumulate(*b, f(c));
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        same_rank(self, other)?;
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.accumulate(*b, c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> T {
        self.terms
            .values()
            .map(|c| c.abs())
            .fold(T::zero(), |m, c| if c > m { c } else { m })
    }

    pub(crate) fn accumulate(&mut self, blade: BladeIndex, value: T) {
        if value.is_zero() {
            return;
        }
        match self.terms.get_mut(&blade) {
            Some(existing) => {
                let sum = existing.clone() + value;
                if sum.is_zero() {
                    self.terms.remove(&blade);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(blade, value);
            }
        }
    }
}

fn check_rank(rank: usize) -> Result<()> {
    if !(1..=MAX_RANK).contains(&rank) {
        return Err(Error::UnsupportedRank { rank, reason: "Clifford rank must be in 1..=32" });
    }
    Ok(())
}

fn same_rank<T>(a: &MultiVector<T>, b: &MultiVector<T>) -> Result<()> {
    if a.rank != b.rank {
        return Err(Error::RankMismatch { left: a.rank, right: b.rank });
    }
    Ok(())
}

/// Bilinear product over blade pairs, keeping only pairs accepted by `keep`.
fn blade_bilinear<T: Coefficient>(
    a: &MultiVector<T>,
    b: &MultiVector<T>,
    keep: impl Fn(BladeIndex, BladeIndex) -> bool,
) -> Result<MultiVector<T>> {
    same_rank(a, b)?;
    if std::ptr::eq(a, b) {
        return Ok(blade_square(a, keep));
    }
    let mut acc: BTreeMap<BladeIndex, T> = BTreeMap::new();
    for (ba, ca) in &a.terms {
        for (bb, cb) in &b.terms {
            if !keep(*ba, *bb) {
                continue;
            }
            let (blade, sign) = ba.product(*bb);
            let term = ca.clone() * cb.clone();
            add_signed(&mut acc, blade, term, sign);
        }
    }
    acc.retain(|_, c| !c.is_zero());
    Ok(MultiVector { rank: a.rank, terms: acc })
}

/// `a ⋆ a`: each unordered pair is visited once and the two orders are
/// combined, so pairs whose signs cancel cost nothing.
fn blade_square<T: Coefficient>(a: &MultiVector<T>, keep: impl Fn(BladeIndex, BladeIndex) -> bool) -> MultiVector<T> {
    let terms: Vec<_> = a.terms.iter().collect();
    let mut acc: BTreeMap<BladeIndex, T> = BTreeMap::new();
    for (i, (ba, ca)) in terms.iter().enumerate() {
        if keep(**ba, **ba) {
            let (blade, sign) = ba.product(**ba);
            add_signed(&mut acc, blade, (*ca).clone() * (*ca).clone(), sign);
        }
        for (bb, cb) in &terms[i + 1..] {
            let forward = if keep(**ba, **bb) { ba.product(**bb) } else { (BladeIndex::from_mask(0), 0) };
            let backward = if keep(**bb, **ba) { bb.product(**ba) } else { (BladeIndex::from_mask(0), 0) };
            let blade = if forward.1 != 0 { forward.0 } else { backward.0 };
            let sign = forward.1 + backward.1;
            if sign == 0 {
                continue;
            }
            let term = (*ca).clone() * (*cb).clone();
            let term = if sign.abs() == 2 { term.clone() + term } else { term };
            add_signed(&mut acc, blade, term, sign.signum());
        }
    }
    acc.retain(|_, c| !c.is_zero());
    MultiVector { rank: a.rank, terms: acc }
}

fn add_signed<T: Coefficient>(acc: &mut BTreeMap<BladeIndex, T>, blade: BladeIndex, term: T, sign: i8) {
    let term = if sign < 0 { -term } else { term };
    match acc.get_mut(&blade) {
        Some(v) => {
            let current = std::mem::replace(v, T::zero());
            *v = current + term;
        }
        None => {
            acc.insert(blade, term);
        }
    }
}

/// Clifford product `a · b`.
pub fn geometric_product<T: Coefficient>(a: &MultiVector<T>, b: &MultiVector<T>) -> Result<MultiVector<T>> {
    blade_bilinear(a, b, |_, _| true)
}

/// Exterior product: on blades of grades `p` and `q` this is the grade
/// `p + q` part of the Clifford product, i.e. zero unless the blades are
/// disjoint.
pub fn wedge<T: Coefficient>(a: &MultiVector<T>, b: &MultiVector<T>) -> Result<MultiVector<T>> {
    blade_bilinear(a, b, |x, y| x.disjoint(y))
}

/// `A ∧ A = 0` for a pure bivector `A`.
///
/// The zero bivector is reported decomposable; use [`is_unit`] to separate
/// the degenerate case.
pub fn is_decomposable<T: Coefficient>(a: &MultiVector<T>) -> Result<bool> {
    a.require_grade(2)?;
    Ok(wedge(a, a)?.is_zero())
}

/// Whether `A · A = -1` for a pure bivector `A`, with every coefficient of
/// `A · A + 1` bounded by `tolerance` (so `tolerance = 0` demands exact
/// equality).
pub fn squares_to_minus_one<T: Coefficient>(a: &MultiVector<T>, tolerance: &T) -> Result<bool> {
    a.require_grade(2)?;
    let square = geometric_product(a, a)?;
    let shifted = square.try_add(&MultiVector::scalar(a.rank, T::one())?)?;
    Ok(shifted.terms.values().all(|c| c.abs() <= *tolerance))
}

/// `norm²(A) = 1` within `tolerance`.
pub fn is_unit<T: Coefficient>(a: &MultiVector<T>, tolerance: &T) -> bool {
    (a.norm_squared() - T::one()).abs() <= *tolerance
}

impl<T: Coefficient> Neg for &MultiVector<T> {
    type Output = MultiVector<T>;

    fn neg(self) -> MultiVector<T> {
        MultiVector {
            rank: self.rank,
            terms: self.terms.iter().map(|(b, c)| (*b, -c.clone())).collect(),
        }
    }
}

impl<T: Coefficient> Neg for MultiVector<T> {
    type Output = MultiVector<T>;

    fn neg(self) -> MultiVector<T> {
        -&self
    }
}

/// Panics on rank mismatch; use [`MultiVector::try_add`] for a fallible sum.
impl<T: Coefficient> Add for &MultiVector<T> {
    type Output = MultiVector<T>;

    fn add(self, rhs: Self) -> MultiVector<T> {
        self.try_add(rhs).expect("rank mismatch in multivector sum")
    }
}

impl<T: Coefficient> Sub for &MultiVector<T> {
    type Output = MultiVector<T>;

    fn sub(self, rhs: Self) -> MultiVector<T> {
        self.try_sub(rhs).expect("rank mismatch in multivector difference")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn e(rank: usize, ix: &[usize]) -> MultiVector<Q> {
        MultiVector::blade(rank, ix, q(1, 1)).unwrap()
    }

    #[test]
    fn generator_product_examples() {
        let p = geometric_product(&e(4, &[1]), &e(4, &[2])).unwrap();
        assert_eq!(p, e(4, &[1, 2]));

        let e12 = e(4, &[1, 2]);
        let sq = geometric_product(&e12, &e12).unwrap();
        assert_eq!(sq, MultiVector::scalar(4, q(-1, 1)).unwrap());

        // Four cross terms: e12e12 = -1, e34e34 = -1, e12e34 = e34e12 = e1234.
        let a = &e(4, &[1, 2]) + &e(4, &[3, 4]);
        let expected = &MultiVector::scalar(4, q(-2, 1)).unwrap()
            + &MultiVector::blade(4, &[1, 2, 3, 4], q(2, 1)).unwrap();
        assert_eq!(geometric_product(&a, &a).unwrap(), expected);
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge(&e(3, &[1]), &e(3, &[2])).unwrap(), e(3, &[1, 2]));
        assert!(wedge(&e(3, &[1, 2]), &e(3, &[1, 2])).unwrap().is_zero());
        let a = &e(4, &[1, 2]) + &e(4, &[3, 4]);
        assert_eq!(wedge(&a, &a).unwrap(), MultiVector::blade(4, &[1, 2, 3, 4], q(2, 1)).unwrap());
    }

    #[test]
    fn decomposability_examples() {
        assert!(is_decomposable(&e(4, &[1, 2])).unwrap());
        assert!(!is_decomposable(&(&e(4, &[1, 2]) + &e(4, &[3, 4]))).unwrap());
        let zero = MultiVector::<Q>::zero(4).unwrap();
        assert!(is_decomposable(&zero).unwrap());
        assert!(!squares_to_minus_one(&zero, &q(0, 1)).unwrap());
        assert!(!is_unit(&zero, &q(0, 1)));
        assert!(is_decomposable(&e(4, &[1])).is_err());
    }

    #[test]
    fn square_root_of_minus_one_examples() {
        let zero = q(0, 1);
        assert!(squares_to_minus_one(&e(5, &[1, 2]), &zero).unwrap());
        assert!(!squares_to_minus_one(&(&e(5, &[1, 2]) + &e(5, &[3, 4])), &zero).unwrap());
        let a = MultiVector::bivector(5, [(1, 2, q(3, 5)), (1, 3, q(4, 5))]).unwrap();
        assert!(squares_to_minus_one(&a, &zero).unwrap());
        // equals e1 · (3/5 e2 + 4/5 e3)
        let w = &MultiVector::blade(5, &[2], q(3, 5)).unwrap() + &MultiVector::blade(5, &[3], q(4, 5)).unwrap();
        assert_eq!(geometric_product(&e(5, &[1]), &w).unwrap(), a);
    }

    #[test]
    fn rank_mismatch_is_an_error() {
        assert_eq!(
            geometric_product(&e(3, &[1]), &e(4, &[1])),
            Err(Error::RankMismatch { left: 3, right: 4 })
        );
        assert!(wedge(&e(3, &[1]), &e(4, &[1])).is_err());
    }

    #[test]
    fn blade_constructor_reduces_index_lists() {
        assert_eq!(MultiVector::blade(3, &[2, 1], q(1, 1)).unwrap(), -e(3, &[1, 2]));
        assert_eq!(MultiVector::blade(3, &[2, 2], q(1, 1)).unwrap(), MultiVector::scalar(3, q(-1, 1)).unwrap());
        assert!(MultiVector::blade(3, &[4], q(1, 1)).is_err());
    }
}
