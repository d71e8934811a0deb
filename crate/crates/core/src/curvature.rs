//! The algebraic curvature bracket of a parallel even Clifford structure.
//!
//! At `S = J_12` the bracket is
//! `[R_{X,Y}, J_12] = κ Σ_{s≥3} (⟨J_s1 X, Y⟩ J_s2 - ⟨J_s2 X, Y⟩ J_s1)`.
//! For a general fibre point the same expression is evaluated in an adapted
//! family `J'_ij = L J_ij L^T`, where `L` is a spin lift of the adapted frame.

use nalgebra::{DMatrix, DVector};
use num_traits::FromPrimitive;

use crate::error::{Error, Result};
use crate::fibre::{FibreMetric, FibrePoint, FibreTangent};
use crate::linalg::{max_abs, spectral_norm, trace_inner};
use crate::repmat::CliffordRep;
use crate::scalar::{Coefficient, Real};

/// `(R, κ)` on `R^n` with the Euclidean metric.
#[derive(Clone, Debug)]
pub struct CurvatureModel<T> {
    rep: CliffordRep<T>,
    kappa: T,
}

/// A fibre point with a spin lift of its adapted frame.
#[derive(Clone, Debug)]
pub struct AdaptedPoint<T: Real> {
    point: FibrePoint<T>,
    frame: DMatrix<T>,
    lift: DMatrix<T>,
    phi_s: DMatrix<T>,
}

/// Einstein constants as printed: `κ(n/4 + 2r - 4)` on the base and `2rκ`
/// on the fibre. The fibre constant is `None` (flagged) when `κ ≤ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct EinsteinConstants<K> {
    pub ricci_base: K,
    pub ricci_fibre: Option<K>,
}

/// Works for any ordered field with exact small-integer conversion, e.g.
/// `BigRational` or `f64`.
pub fn einstein_constants<K>(rank: usize, dim: usize, kappa: &K) -> EinsteinConstants<K>
where
    K: Coefficient + FromPrimitive,
{
    let int = |x: usize| K::from_usize(x).expect("small integer");
    let base = int(dim) / int(4) + int(2 * rank) - int(4);
    let ricci_base = kappa.clone() * base;
    let ricci_fibre = (*kappa > K::zero()).then(|| kappa.clone() * int(2 * rank));
    EinsteinConstants { ricci_base, ricci_fibre }
}

/// Why a model falls outside the theorem hypotheses (`r > 4`, `n ≠ 8`,
/// and `κ > 0` when `require_positive` is set).
pub fn hypothesis_violation(rank: usize, dim: usize, kappa: f64, require_positive: bool) -> Option<String> {
    if rank <= 4 {
        Some(format!("r = {rank} ≤ 4 excluded"))
    } else if dim == 8 {
        Some("n = 8 excluded".to_string())
    } else if require_positive && kappa <= 0.0 {
        Some(format!("κ = {kappa} ≤ 0 excluded"))
    } else {
        None
    }
}

impl<T: Real> AdaptedPoint<T> {
    /// Uses the deterministic adapted frame of `point`.
    pub fn new(rep: &CliffordRep<T>, point: FibrePoint<T>) -> Result<Self> {
        let frame = point.frame().clone();
        Self::with_frame(rep, point, frame)
    }

    /// Uses an explicit oriented frame whose first two columns span the
    /// plane of `point` with `f_1 ∧ f_2 = z`.
    pub fn with_frame(rep: &CliffordRep<T>, point: FibrePoint<T>, frame: DMatrix<T>) -> Result<Self> {
        if rep.rank() != point.rank() {
            return Err(Error::RankMismatch { left: rep.rank(), right: point.rank() });
        }
        let plane = crate::clifford::wedge_vectors(&frame.column(0).into_owned(), &frame.column(1).into_owned())?;
        let mismatch = plane.try_sub(point.bivector())?.max_abs();
        if mismatch > T::lit(1e-9) {
            return Err(Error::DegeneratePoint(format!(
                "frame does not span the plane (defect {:e})",
                mismatch.to_f64_lossy()
            )));
        }
        let lift = rep.spin_lift(&frame)?;
        let phi_s = rep.phi(point.bivector())?;
        Ok(AdaptedPoint { point, frame, lift, phi_s })
    }

    pub fn point(&self) -> &FibrePoint<T> {
        &self.point
    }

    pub fn frame(&self) -> &DMatrix<T> {
        &self.frame
    }

    pub fn lift(&self) -> &DMatrix<T> {
        &self.lift
    }

    /// `φ(S)`.
    pub fn phi(&self) -> &DMatrix<T> {
        &self.phi_s
    }

    /// `J'_ij = L J_ij L^T` (any order of `i ≠ j`).
    pub fn j(&self, rep: &CliffordRep<T>, i: usize, j: usize) -> Result<DMatrix<T>> {
        Ok(&self.lift * rep.j(i, j)? * self.lift.transpose())
    }

    /// `φ` of the vertical basis vectors `f_1∧f_s` (`s = 3..r`), then
    /// `f_2∧f_s`, in [`FibreTangent`] coordinate order.
    pub fn vertical_family(&self, rep: &CliffordRep<T>) -> Result<Vec<DMatrix<T>>> {
        let r = rep.rank();
        let mut out = Vec::with_capacity(2 * (r - 2));
        for a in [1, 2] {
            for s in 3..=r {
                out.push(self.j(rep, a, s)?);
            }
        }
        Ok(out)
    }
}

impl<T: Real> CurvatureModel<T> {
    pub fn new(rep: CliffordRep<T>, kappa: T) -> Self {
        CurvatureModel { rep, kappa }
    }

    pub fn rep(&self) -> &CliffordRep<T> {
        &self.rep
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn rank(&self) -> usize {
        self.rep.rank()
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    /// `Err(HypothesisNotMet)` outside `r > 4`, `n ≠ 8` (and `κ > 0` when
    /// `require_positive`).
    pub fn check_hypotheses(&self, require_positive: bool) -> Result<()> {
        match hypothesis_violation(self.rank(), self.dim(), self.kappa.to_f64_lossy(), require_positive) {
            Some(reason) => Err(Error::HypothesisNotMet(reason)),
            None => Ok(()),
        }
    }

    pub fn adapt(&self, point: FibrePoint<T>) -> Result<AdaptedPoint<T>> {
        AdaptedPoint::new(&self.rep, point)
    }

    /// Fibre metric with `‖e_i ∧ e_j‖^2 = 1/κ`.
    pub fn fibre_metric(&self) -> FibreMetric<T> {
        FibreMetric::new(self.kappa)
    }

    /// The bracket at `S = J_12` in the fixed family.
    pub fn axis_bracket(&self, x: &DVector<T>, y: &DVector<T>) -> Result<DMatrix<T>> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        if self.kappa == T::zero() {
            return Ok(out);
        }
        for s in 3..=self.rank() {
            let (j1s, j2s) = (self.rep.j_ref(1, s), self.rep.j_ref(2, s));
            // J_s1 = -J_1s, J_s2 = -J_2s
            let a = -y.dot(&(j1s * x));
            let b = -y.dot(&(j2s * x));
            out -= j2s * a;
            out += j1s * b;
        }
        Ok(out * self.kappa)
    }

    /// `[R_{X,Y}, φ(S)]`.
    pub fn curv_bracket(&self, x: &DVector<T>, y: &DVector<T>, s: &AdaptedPoint<T>) -> Result<DMatrix<T>> {
        let n = self.dim();
        if x.len() != n || y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: x.len().max(y.len()) });
        }
        let l = s.lift();
        let lt = l.transpose();
        let inner = self.axis_bracket(&(&lt * x), &(&lt * y))?;
        Ok(l * inner * lt)
    }

    /// Operator norm of
    /// `[R_{SX,SY},S] - S[R_{SX,Y},S] - S[R_{X,SY},S] - [R_{X,Y},S]`.
    pub fn four_term_residual(&self, x: &DVector<T>, y: &DVector<T>, s: &AdaptedPoint<T>) -> Result<T> {
        let p = s.phi();
        let (sx, sy) = (p * x, p * y);
        let combo = self.curv_bracket(&sx, &sy, s)?
            - p * self.curv_bracket(&sx, y, s)?
            - p * self.curv_bracket(x, &sy, s)?
            - self.curv_bracket(x, y, s)?;
        Ok(spectral_norm(&combo))
    }

    /// Printed Einstein constants for this model.
    pub fn einstein_constants(&self) -> EinsteinConstants<T> {
        einstein_constants(self.rank(), self.dim(), &self.kappa)
    }

    /// Bilinear forms `W_k` with `φ^{-1}(-[R_{X,Y}, S])` having adapted
    /// fibre coordinate `k` equal to `X^T W_k Y`.
    pub fn vertical_bracket_forms(&self, s: &AdaptedPoint<T>) -> Result<Vec<DMatrix<T>>> {
        let n = self.dim();
        let family = s.vertical_family(&self.rep)?;
        let norm = T::from_usize(n).unwrap();
        // -[R_{X,Y},S] is bilinear in (X, Y); read it on the standard basis.
        let mut forms = vec![DMatrix::zeros(n, n); family.len()];
        for a in 0..n {
            let ea = DVector::from_fn(n, |i, _| if i == a { T::one() } else { T::zero() });
            for b in a + 1..n {
                let eb = DVector::from_fn(n, |i, _| if i == b { T::one() } else { T::zero() });
                let m = -self.curv_bracket(&ea, &eb, s)?;
                for (k, jk) in family.iter().enumerate() {
                    let c = trace_inner(&m, jk) / norm;
                    forms[k][(a, b)] = c;
                    forms[k][(b, a)] = -c;
                }
            }
        }
        Ok(forms)
    }

    /// `φ^{-1}(M)` in adapted fibre coordinates at `s`, rejecting matrices
    /// with a component outside the vertical family above `tolerance`.
    pub fn vertical_pullback(&self, m: &DMatrix<T>, s: &AdaptedPoint<T>, tolerance: T) -> Result<FibreTangent<T>> {
        let family = s.vertical_family(&self.rep)?;
        let norm = T::from_usize(self.dim()).unwrap();
        let coords = DVector::from_iterator(family.len(), family.iter().map(|j| trace_inner(m, j) / norm));
        let mut rebuilt = DMatrix::zeros(m.nrows(), m.ncols());
        for (j, c) in family.iter().zip(coords.iter()) {
            rebuilt += j * *c;
        }
        let residual = max_abs(&(m - rebuilt));
        if residual > tolerance * max_abs(m).max(T::one()) {
            return Err(Error::NotInSpan { residual: residual.to_f64_lossy() });
        }
        FibreTangent::from_coordinates(coords)
    }
}
