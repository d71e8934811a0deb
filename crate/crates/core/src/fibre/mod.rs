//! The twistor fibre: the Grassmannian of oriented 2-planes in `R^r`,
//! modelled by unit decomposable bivectors, with the complex structure
//! `v ↦ z·v` and the metric scaled so that `‖e_i ∧ e_j‖^2 = 1/κ`.
//!
//! Tangent vectors at `z = f_1 ∧ f_2` (adapted frame `f`) are written
//! `v = Σ_s α_s f_1∧f_s + β_s f_2∧f_s`, `s = 3..r`, and stored as the
//! coordinate vector `[α_3 .. α_r, β_3 .. β_r]`.

mod chart;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::clifford::{
    bivector_coordinates, bivector_from_coordinates, orthogonalize, rotate_bivector, skew_matrix, wedge,
    wedge_vectors, MultiVector,
};
use crate::error::{Error, Result};
use crate::linalg::max_abs;
use crate::repmat::CliffordRep;
use crate::sampling::{gaussian_vector, random_rotation};
use crate::scalar::Real;

pub(crate) use chart::nijenhuis_from_jet;
pub use chart::{
    fibre_nijenhuis, fibre_nijenhuis_estimate, kaehler_form_defect, normal_chart_first_derivatives, ricci_in_chart,
    tangent_dimension, ExpChart, NijenhuisEstimate,
};

/// A point of the fibre together with its deterministic adapted frame.
#[derive(Clone, Debug)]
pub struct FibrePoint<T> {
    z: MultiVector<T>,
    frame: DMatrix<T>,
}

/// Oriented orthonormal frame `f` with `z = f_1 ∧ f_2`.
///
/// `f_1` is the normalized projection onto the plane of `z` of the
/// canonical basis vector with the largest projection (lowest index on
/// ties), `f_2 = S_z f_1`, and the rest is Gram–Schmidt against the
/// canonical basis in index order.
pub fn adapted_frame<T: Real>(z: &MultiVector<T>) -> Result<DMatrix<T>> {
    check_point(z)?;
    let r = z.rank();
    let s = skew_matrix(z)?;
    let projector = -(&s * &s);
    let mut best = 0;
    for k in 1..r {
        if projector.column(k).norm() > projector.column(best).norm() + T::lit(1e-12) {
            best = k;
        }
    }
    let p = projector.column(best).into_owned();
    let f1 = &p / p.norm();
    let f2 = &s * &f1;
    let mut cols = vec![f1, f2];
    for i in 0..r {
        if cols.len() == r {
            break;
        }
        if let Some(v) = orthogonalize(DVector::from_fn(r, |k, _| if k == i { T::one() } else { T::zero() }), &cols) {
            cols.push(v);
        }
    }
    let mut f = DMatrix::from_columns(&cols);
    if f.determinant() < T::zero() {
        f.column_mut(r - 1).neg_mut();
    }
    Ok(f)
}

fn check_point<T: Real>(z: &MultiVector<T>) -> Result<()> {
    z.require_grade(2)?;
    if z.rank() < 2 {
        return Err(Error::UnsupportedRank { rank: z.rank(), reason: "the fibre needs r ≥ 2" });
    }
    let tol = T::structural_tolerance();
    let norm_defect = (z.norm_squared() - T::one()).abs();
    if norm_defect > tol {
        return Err(Error::DegeneratePoint(format!("|z|^2 - 1 = {:e}", norm_defect.to_f64_lossy())));
    }
    let ww = wedge(z, z)?.max_abs();
    if ww > tol {
        return Err(Error::DegeneratePoint(format!("z ∧ z = {:e}", ww.to_f64_lossy())));
    }
    Ok(())
}

impl<T: Real> FibrePoint<T> {
    /// Validates `z` (unit, decomposable) and computes its adapted frame.
    pub fn new(z: MultiVector<T>) -> Result<Self> {
        let frame = adapted_frame(&z)?;
        Ok(FibrePoint { z, frame })
    }

    /// `u ∧ w` for an orthonormal pair.
    pub fn from_vectors(u: &DVector<T>, w: &DVector<T>) -> Result<Self> {
        Self::new(wedge_vectors(u, w)?)
    }

    /// `e_i ∧ e_j`.
    pub fn axis(rank: usize, i: usize, j: usize) -> Result<Self> {
        Self::new(MultiVector::blade(rank, &[i, j], T::one())?)
    }

    /// Uniformly distributed plane: the first two columns of a Haar rotation.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> Result<Self> {
        let q: DMatrix<T> = random_rotation(rng, rank);
        Self::from_vectors(&q.column(0).into_owned(), &q.column(1).into_owned())
    }

    pub fn rank(&self) -> usize {
        self.z.rank()
    }

    pub fn bivector(&self) -> &MultiVector<T> {
        &self.z
    }

    /// Columns `f_1 .. f_r`.
    pub fn frame(&self) -> &DMatrix<T> {
        &self.frame
    }

    pub fn tangent_dim(&self) -> usize {
        2 * (self.rank() - 2)
    }

    /// `max |φ(z)^2 + I|`.
    pub fn representation_defect(&self, rep: &CliffordRep<T>) -> Result<T> {
        let p = rep.phi(&self.z)?;
        let n = rep.dim();
        Ok(max_abs(&(&p * &p + DMatrix::identity(n, n))))
    }

    /// `f_a ∧ f_b` (1-based frame indices).
    pub fn frame_blade(&self, a: usize, b: usize) -> MultiVector<T> {
        wedge_vectors(&self.frame.column(a - 1).into_owned(), &self.frame.column(b - 1).into_owned())
            .expect("frame columns share a length")
    }

    /// Coefficients `a_ij` in lexicographic order, 17 significant digits,
    /// space separated.
    pub fn serialize(&self) -> String {
        bivector_coordinates(&self.z)
            .iter()
            .map(|c| format!("{:.16e}", c.to_f64_lossy()))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Inverse of [`FibrePoint::serialize`]; the rank is inferred from the
    /// number of coefficients.
    pub fn deserialize(input: &str) -> Result<Self> {
        let mut coords = Vec::new();
        for (k, token) in input.split_whitespace().enumerate() {
            let v: f64 = token
                .parse()
                .map_err(|_| Error::Parse { position: k, message: format!("bad coefficient `{token}`") })?;
            coords.push(T::lit(v));
        }
        let len = coords.len();
        let rank = (2..=crate::clifford::MAX_RANK)
            .find(|r| r * (r - 1) / 2 == len)
            .ok_or(Error::Parse { position: len, message: format!("{len} is not a pair count") })?;
        Self::new(bivector_from_coordinates(rank, &DVector::from_vec(coords))?)
    }
}

/// A tangent vector at a [`FibrePoint`], in adapted coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct FibreTangent<T: Real> {
    coords: DVector<T>,
}

impl<T: Real> FibreTangent<T> {
    pub fn from_coordinates(coords: DVector<T>) -> Result<Self> {
        if !coords.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch { expected: coords.len() + 1, actual: coords.len() });
        }
        Ok(FibreTangent { coords })
    }

    pub fn zero(rank: usize) -> Self {
        FibreTangent { coords: DVector::zeros(2 * (rank - 2)) }
    }

    /// `α_s`, `s = 3..=r`.
    pub fn alpha(&self, s: usize) -> T {
        self.coords[s - 3]
    }

    /// `β_s`, `s = 3..=r`.
    pub fn beta(&self, s: usize) -> T {
        self.coords[self.coords.len() / 2 + s - 3]
    }

    pub fn coordinates(&self) -> &DVector<T> {
        &self.coords
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, rank: usize) -> Self {
        FibreTangent { coords: gaussian_vector(rng, 2 * (rank - 2)) }
    }

    pub fn scale(&self, c: T) -> Self {
        FibreTangent { coords: &self.coords * c }
    }

    /// `Σ α_s f_1∧f_s + β_s f_2∧f_s` as a skew matrix on `R^r`.
    pub fn to_skew(&self, base: &FibrePoint<T>) -> Result<DMatrix<T>> {
        let r = base.rank();
        let d = 2 * (r - 2);
        if self.coords.len() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: self.coords.len() });
        }
        let f = base.frame();
        let (f1, f2) = (f.column(0), f.column(1));
        let mut s = DMatrix::zeros(r, r);
        for k in 0..r - 2 {
            let fs = f.column(k + 2);
            let (a, b) = (self.coords[k], self.coords[r - 2 + k]);
            // u ∧ w ↦ w u^T - u w^T
            s += (fs * f1.transpose() - f1 * fs.transpose()) * a;
            s += (fs * f2.transpose() - f2 * fs.transpose()) * b;
        }
        Ok(s)
    }

    pub fn to_bivector(&self, base: &FibrePoint<T>) -> Result<MultiVector<T>> {
        crate::clifford::bivector_from_skew(&self.to_skew(base)?)
    }

    /// Adapted coordinates of a bivector; fails with [`Error::NotTangent`]
    /// when the part outside `span{f_1∧f_s, f_2∧f_s}` exceeds `tolerance`.
    pub fn from_bivector(base: &FibrePoint<T>, v: &MultiVector<T>, tolerance: T) -> Result<Self> {
        let s = skew_matrix(v)?;
        Self::from_skew(base, &s, tolerance)
    }

    pub fn from_skew(base: &FibrePoint<T>, s: &DMatrix<T>, tolerance: T) -> Result<Self> {
        let r = base.rank();
        let f = base.frame();
        // Coefficient of f_a ∧ f_b is (f^T S f)[b, a].
        let local = f.transpose() * s * f;
        let mut coords = DVector::zeros(2 * (r - 2));
        for k in 0..r - 2 {
            coords[k] = local[(k + 2, 0)];
            coords[r - 2 + k] = local[(k + 2, 1)];
        }
        let t = FibreTangent { coords };
        let residual = max_abs(&(t.to_skew(base)? - s));
        if residual > tolerance {
            return Err(Error::NotTangent { residual: residual.to_f64_lossy() });
        }
        Ok(t)
    }
}

/// `(α, β) ↦ (-β, α)`, the coordinate form of `v ↦ z·v`.
pub fn fibre_acs<T: Real>(v: &FibreTangent<T>) -> FibreTangent<T> {
    let d = v.coords.len() / 2;
    let mut out = DVector::zeros(2 * d);
    for k in 0..d {
        out[k] = -v.coords[d + k];
        out[d + k] = v.coords[k];
    }
    FibreTangent { coords: out }
}

/// `fibre_acs` computed through the Clifford product `z·v` and read back in
/// the adapted frame, with a tangency check on the result.
pub fn fibre_acs_clifford<T: Real>(z: &FibrePoint<T>, v: &FibreTangent<T>) -> Result<FibreTangent<T>> {
    let zv = crate::clifford::geometric_product(z.bivector(), &v.to_bivector(z)?)?;
    let residue = zv.grade_part(0).max_abs().max(zv.grade_part(4).max_abs());
    if residue > T::lit(1e-9) {
        return Err(Error::NotTangent { residual: residue.to_f64_lossy() });
    }
    FibreTangent::from_bivector(z, &zv.grade_part(2), T::lit(1e-9))
}

/// Metric on the fibre: `scale · Σ (α α' + β β')`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FibreMetric<T> {
    pub kappa: T,
    pub scale: T,
}

impl<T: Real> FibreMetric<T> {
    /// Scale `1/κ`, so that `‖e_i ∧ e_j‖^2 = 1/κ`; scale 1 when `κ ≤ 0`.
    pub fn new(kappa: T) -> Self {
        let scale = if kappa > T::zero() { T::one() / kappa } else { T::one() };
        FibreMetric { kappa, scale }
    }

    pub fn with_scale(kappa: T, scale: T) -> Self {
        FibreMetric { kappa, scale }
    }

    pub fn inner(&self, u: &FibreTangent<T>, v: &FibreTangent<T>) -> T {
        u.coords.dot(&v.coords) * self.scale
    }

    /// Einstein constant of this metric on `Gr_2^+(R^r)`: the unit-scale
    /// metric has `Ric = (r - 2) g`.
    pub fn einstein_constant(&self, rank: usize) -> T {
        T::from_usize(rank - 2).unwrap() / self.scale
    }
}

/// Moves `z` along the one-parameter rotation group generated by `z·v`,
/// so that `d/dt retract(z, v, t) = v` at `t = 0`.
pub fn retract<T: Real>(z: &FibrePoint<T>, v: &FibreTangent<T>, t: T) -> Result<FibrePoint<T>> {
    let generator = fibre_acs(v).to_skew(z)? * t;
    let rot = generator.exp();
    let f = rot * z.frame();
    FibrePoint::from_vectors(&f.column(0).into_owned(), &f.column(1).into_owned())
}

/// Action of a rotation on tangent vectors at a point it fixes.
pub fn isotropy_action<T: Real>(
    z: &FibrePoint<T>,
    rotation: &DMatrix<T>,
    v: &FibreTangent<T>,
) -> Result<FibreTangent<T>> {
    let moved = rotate_bivector(rotation, &v.to_bivector(z)?)?;
    FibreTangent::from_bivector(z, &moved, T::lit(1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::geometric_product;
    use crate::linalg::orthogonality_defect;
    use crate::sampling::stream;

    #[test]
    fn adapted_frame_examples() {
        let p = FibrePoint::<f64>::axis(4, 1, 2).unwrap();
        assert_eq!(p.frame(), &DMatrix::identity(4, 4));
        let p = FibrePoint::<f64>::axis(4, 2, 3).unwrap();
        let f = p.frame();
        assert_eq!(f.column(0).into_owned(), DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]));
        assert_eq!(f.column(1).into_owned(), DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]));
        assert!((f.determinant() - 1.0).abs() < 1e-12);
        assert_eq!(adapted_frame(p.bivector()).unwrap(), *f);
    }

    #[test]
    fn adapted_frame_of_random_points() {
        let mut rng = stream(11, "adapted");
        for r in [3, 5, 9, 16] {
            for _ in 0..20 {
                let p = FibrePoint::<f64>::random(&mut rng, r).unwrap();
                let f = p.frame();
                assert!(orthogonality_defect(f) < 1e-12);
                assert!((f.determinant() - 1.0).abs() < 1e-10);
                let back = p.frame_blade(1, 2).try_sub(p.bivector()).unwrap();
                assert!(back.max_abs() < 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_points_are_rejected() {
        let z = MultiVector::bivector(4, [(1, 2, 1.0), (3, 4, 1.0)]).unwrap().scale(&std::f64::consts::FRAC_1_SQRT_2);
        assert!(matches!(FibrePoint::new(z), Err(Error::DegeneratePoint(_))));
        let z = MultiVector::blade(3, &[1, 2], 2.0).unwrap();
        assert!(matches!(FibrePoint::new(z), Err(Error::DegeneratePoint(_))));
    }

    #[test]
    fn acs_matches_clifford_product() {
        let z = FibrePoint::<f64>::axis(4, 1, 2).unwrap();
        let e13 = MultiVector::blade(4, &[1, 3], 1.0).unwrap();
        let v = FibreTangent::from_bivector(&z, &e13, 1e-12).unwrap();
        let jv = fibre_acs(&v);
        let exact = geometric_product(z.bivector(), &e13).unwrap();
        assert_eq!(exact, MultiVector::blade(4, &[2, 3], 1.0).unwrap());
        assert_eq!(jv.to_bivector(&z).unwrap(), exact);

        let mut rng = stream(12, "acs");
        for _ in 0..20 {
            let p = FibrePoint::<f64>::random(&mut rng, 7).unwrap();
            let v = FibreTangent::random(&mut rng, 7);
            let via_product = fibre_acs_clifford(&p, &v).unwrap();
            assert!((via_product.coordinates() - fibre_acs(&v).coordinates()).amax() < 1e-10);
            let jj = fibre_acs(&fibre_acs(&v));
            assert_eq!(jj.coordinates(), &-v.coordinates());
        }
    }

    #[test]
    fn acs_is_an_isometry() {
        let metric = FibreMetric::new(2.0);
        let mut rng = stream(13, "acs-iso");
        for _ in 0..20 {
            let u = FibreTangent::<f64>::random(&mut rng, 6);
            let v = FibreTangent::<f64>::random(&mut rng, 6);
            let lhs = metric.inner(&fibre_acs(&u), &fibre_acs(&v));
            assert!((lhs - metric.inner(&u, &v)).abs() < 1e-10);
        }
    }

    #[test]
    fn metric_normalization() {
        let z = FibrePoint::<f64>::axis(5, 1, 2).unwrap();
        let metric = FibreMetric::new(4.0);
        let v = FibreTangent::from_bivector(&z, &MultiVector::blade(5, &[2, 4], 1.0).unwrap(), 1e-12).unwrap();
        assert!((metric.inner(&v, &v) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn non_tangent_bivectors_are_rejected() {
        let z = FibrePoint::<f64>::axis(4, 1, 2).unwrap();
        let e34 = MultiVector::blade(4, &[3, 4], 1.0).unwrap();
        assert!(matches!(FibreTangent::from_bivector(&z, &e34, 1e-9), Err(Error::NotTangent { .. })));
    }

    #[test]
    fn retract_examples() {
        let z = FibrePoint::<f64>::axis(3, 1, 2).unwrap();
        let v = FibreTangent::from_bivector(&z, &MultiVector::blade(3, &[1, 3], 1.0).unwrap(), 1e-12).unwrap();
        assert!((retract(&z, &v, 0.0).unwrap().bivector().try_sub(z.bivector()).unwrap()).max_abs() < 1e-15);
        let moved = retract(&z, &v, std::f64::consts::FRAC_PI_2).unwrap();
        // f_2 has turned into f_3, so the plane is e1 ∧ e3.
        let expected = MultiVector::blade(3, &[1, 3], 1.0).unwrap();
        assert!(moved.bivector().try_sub(&expected).unwrap().max_abs() < 1e-10);

        let h = 1e-5;
        let mut rng = stream(14, "retract");
        for _ in 0..10 {
            let p = FibrePoint::<f64>::random(&mut rng, 6).unwrap();
            let v = FibreTangent::random(&mut rng, 6);
            let step = retract(&p, &v, h).unwrap();
            let fd = step.bivector().try_sub(p.bivector()).unwrap().scale(&(1.0 / h));
            let err = fd.try_sub(&v.to_bivector(&p).unwrap()).unwrap().max_abs();
            assert!(err < 1e-4 * (1.0 + v.coordinates().norm().powi(2)), "err {err}");
        }
    }

    #[test]
    fn isotropy_commutes_with_acs() {
        let mut rng = stream(15, "isotropy");
        for _ in 0..10 {
            let p = FibrePoint::<f64>::random(&mut rng, 6).unwrap();
            let theta: f64 = rng.random_range(0.0..6.0);
            let q: DMatrix<f64> = random_rotation(&mut rng, 4);
            let mut local = DMatrix::identity(6, 6);
            local[(0, 0)] = theta.cos();
            local[(1, 0)] = theta.sin();
            local[(0, 1)] = -theta.sin();
            local[(1, 1)] = theta.cos();
            local.view_mut((2, 2), (4, 4)).copy_from(&q);
            let k = p.frame() * local * p.frame().transpose();
            let v = FibreTangent::random(&mut rng, 6);
            let lhs = fibre_acs(&isotropy_action(&p, &k, &v).unwrap());
            let rhs = isotropy_action(&p, &k, &fibre_acs(&v)).unwrap();
            assert!((lhs.coordinates() - rhs.coordinates()).amax() < 1e-9);
        }
    }

    #[test]
    fn serialization_round_trip() {
        let mut rng = stream(16, "serialize");
        let p = FibrePoint::<f64>::random(&mut rng, 5).unwrap();
        let text = p.serialize();
        assert_eq!(text.split(' ').count(), 10);
        let back = FibrePoint::<f64>::deserialize(&text).unwrap();
        assert_eq!(back.bivector(), p.bivector());
        assert_eq!(
            FibrePoint::<f64>::axis(3, 1, 2).unwrap().serialize(),
            "1.0000000000000000e0 0.0000000000000000e0 0.0000000000000000e0"
        );
    }

    #[test]
    fn representation_membership() {
        let rep = crate::repmat::build_rep::<f64>(5, 1).unwrap();
        let mut rng = stream(17, "membership");
        let p = FibrePoint::<f64>::random(&mut rng, 5).unwrap();
        assert!(p.representation_defect(&rep).unwrap() < 1e-10);
    }
}
