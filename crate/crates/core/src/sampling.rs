//! Seeded sampling. Every random draw in the crate goes through a
//! ChaCha stream derived from a 64-bit seed and a stream label, so reports
//! are reproducible across platforms and independent of scheduling.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::clifford::{BladeIndex, MultiVector};
use crate::scalar::Real;

pub type SampleRng = ChaCha8Rng;

/// Independent stream for `(seed, label)`.
pub fn stream(seed: u64, label: &str) -> SampleRng {
    // FNV-1a over the label, folded into the seed with a splitmix step.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut z = seed ^ h;
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

pub fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let x: f64 = rng.sample(StandardNormal);
    T::lit(x)
}

pub fn gaussian_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<T> {
    DVector::from_fn(n, |_, _| gaussian(rng))
}

/// Standard normal components, then normalized.
pub fn unit_vector<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<T> {
    loop {
        let v: DVector<T> = gaussian_vector(rng, n);
        let norm = v.norm();
        if norm > T::lit(1e-3) {
            return v / norm;
        }
    }
}

/// Haar-distributed rotation in `SO(n)` (QR of a Gaussian matrix with the
/// sign of `R`'s diagonal absorbed, then a column flip to fix orientation).
pub fn random_rotation<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<T> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian::<T, R>(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < T::zero() {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < T::zero() {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Random floating bivector with Gaussian coefficients.
pub fn gaussian_bivector<T: Real, R: Rng + ?Sized>(rng: &mut R, rank: usize) -> MultiVector<T> {
    let mut terms = Vec::new();
    for i in 0..rank {
        for j in i + 1..rank {
            terms.push((BladeIndex::from_mask((1 << i) | (1 << j)), gaussian(rng)));
        }
    }
    MultiVector::from_terms(rank, terms).expect("valid rank")
}

/// Families of exact rational bivectors used to exercise both directions of
/// the square-root-of-minus-one characterization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RationalBivectorKind {
    /// Independent small rationals, many entries zero.
    Generic,
    /// `v1 ∧ v2` for a rational orthonormal pair.
    UnitDecomposable,
    /// `c · v1 ∧ v2` with `c ≠ ±1`.
    ScaledDecomposable,
    /// Unit norm but with `A ∧ A ≠ 0` (two orthogonal planes, Pythagorean
    /// weights); only possible for rank at least 4.
    UnitNonDecomposable,
    /// `v1 ∧ v2 + v3 ∧ v4` for random rational vectors.
    SumOfPlanes,
}

impl RationalBivectorKind {
    pub const ALL: [RationalBivectorKind; 5] = [
        RationalBivectorKind::Generic,
        RationalBivectorKind::UnitDecomposable,
        RationalBivectorKind::ScaledDecomposable,
        RationalBivectorKind::UnitNonDecomposable,
        RationalBivectorKind::SumOfPlanes,
    ];
}

fn small_rational<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    let n: i64 = rng.random_range(-4..=4);
    let d: i64 = rng.random_range(1..=4);
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rational_vector<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> Vec<BigRational> {
    (0..rank).map(|_| small_rational(rng)).collect()
}

/// Columns of a rational orthogonal matrix built from two Householder
/// reflections `I - 2 w w^T / (w^T w)` with small integer `w`.
#[allow(clippy::needless_range_loop)]
fn rational_orthogonal<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = (0..rank)
        .map(|i| {
            (0..rank)
                .map(|j| BigRational::from_integer(BigInt::from(i64::from(i == j))))
                .collect()
        })
        .collect();
    for _ in 0..2 {
        let w: Vec<BigInt> = loop {
            let w: Vec<BigInt> = (0..rank).map(|_| BigInt::from(rng.random_range(-2i64..=2))).collect();
            if w.iter().any(|x| *x != BigInt::from(0)) {
                break w;
            }
        };
        let ww: BigInt = w.iter().map(|x| x * x).sum();
        // m <- H m, column by column
        for col in 0..rank {
            let dot: BigRational = (0..rank)
                .map(|i| BigRational::from_integer(w[i].clone()) * m[i][col].clone())
                .sum();
            let factor = dot * BigRational::new(BigInt::from(2), ww.clone());
            for (i, wi) in w.iter().enumerate() {
                m[i][col] = m[i][col].clone() - factor.clone() * BigRational::from_integer(wi.clone());
            }
        }
    }
    (0..rank).map(|col| (0..rank).map(|i| m[i][col].clone()).collect()).collect()
}

fn exact_wedge(rank: usize, u: &[BigRational], w: &[BigRational]) -> MultiVector<BigRational> {
    let mut terms = Vec::new();
    for i in 0..rank {
        for j in i + 1..rank {
            terms.push((
                BladeIndex::from_mask((1 << i) | (1 << j)),
                u[i].clone() * w[j].clone() - u[j].clone() * w[i].clone(),
            ));
        }
    }
    MultiVector::from_terms(rank, terms).expect("valid rank")
}

pub fn rational_bivector<R: Rng + ?Sized>(
    rng: &mut R,
    rank: usize,
    kind: RationalBivectorKind,
) -> MultiVector<BigRational> {
    match kind {
        RationalBivectorKind::Generic => {
            let mut terms = Vec::new();
            for i in 0..rank {
                for j in i + 1..rank {
                    if rng.random_bool(0.5) {
                        terms.push((BladeIndex::from_mask((1 << i) | (1 << j)), small_rational(rng)));
                    }
                }
            }
            MultiVector::from_terms(rank, terms).expect("valid rank")
        }
        RationalBivectorKind::UnitDecomposable | RationalBivectorKind::ScaledDecomposable => {
            let q = rational_orthogonal(rng, rank);
            let a = rng.random_range(0..rank);
            let b = (a + rng.random_range(1..rank)) % rank;
            let plane = exact_wedge(rank, &q[a], &q[b]);
            if kind == RationalBivectorKind::UnitDecomposable {
                plane
            } else {
                let c = loop {
                    let c = small_rational(rng);
                    if c.clone() * c.clone() != BigRational::from_integer(BigInt::from(1)) {
                        break c;
                    }
                };
                plane.scale(&c)
            }
        }
        RationalBivectorKind::UnitNonDecomposable => {
            let q = rational_orthogonal(rng, rank);
            let triples = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)];
            let (x, y, z) = triples[rng.random_range(0..triples.len())];
            let cx = BigRational::new(BigInt::from(x), BigInt::from(z));
            let cy = BigRational::new(BigInt::from(y), BigInt::from(z));
            if rank < 4 {
                return exact_wedge(rank, &q[0], &q[1]).scale(&cx);
            }
            let p1 = exact_wedge(rank, &q[0], &q[1]).scale(&cx);
            let p2 = exact_wedge(rank, &q[2], &q[3]).scale(&cy);
            &p1 + &p2
        }
        RationalBivectorKind::SumOfPlanes => {
            let (a, b, c, d) = (
                rational_vector(rng, rank),
                rational_vector(rng, rank),
                rational_vector(rng, rank),
                rational_vector(rng, rank),
            );
            &exact_wedge(rank, &a, &b) + &exact_wedge(rank, &c, &d)
        }
    }
}
