//! Pointwise model of the twistor space `T_S Z = V ⊕ H`.
//!
//! Vectors are stored as `[vertical; horizontal]`, the vertical block in
//! adapted fibre coordinates at `S` and the horizontal block in the standard
//! basis of `R^n`. The metric is `h_t = (t · scale) I_V ⊕ I_H`, with the fibre
//! scale `1/κ` by default.
//!
//! The only nonzero bracket among the frame fields (basic horizontal and
//! adapted-constant vertical) is `[X_a, X_b] = φ^{-1}(-[R_{X_a,X_b}, S])`,
//! and the metric coefficients are stationary at the model point, so the
//! Koszul formula reduces to
//! `2h(Γ_E F, G) = h([E,F],G) - h([E,G],F) - h([F,G],E)`.

mod field;
mod flat;
mod suites;

use nalgebra::{DMatrix, DVector};

use crate::curvature::{AdaptedPoint, CurvatureModel};
use crate::error::{Error, Result};
use crate::fibre::{fibre_acs, FibrePoint, FibreTangent};
use crate::scalar::Real;

pub use field::ModelField;
pub use flat::{flat_model_global_check, FlatCheckReport, FlatGrid};
pub use suites::{
    kaehler_identity_suite, nearly_kaehler_check, nijenhuis_horizontal, nijenhuis_mixed, nijenhuis_vertical_pair,
    ConnectionValidity, HorizontalNijenhuis, KaehlerReport, NearlyKaehlerReport, WITNESS_THRESHOLD,
};

/// Which almost complex structure: `𝒥`, or the canonical variation `𝒥̃`
/// with the vertical part reversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    Twistor,
    Variation,
}

/// A tangent vector of `Z` at the model point.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistorVector<T: Real> {
    pub vertical: FibreTangent<T>,
    pub horizontal: DVector<T>,
}

impl<T: Real> TwistorVector<T> {
    pub fn new(vertical: FibreTangent<T>, horizontal: DVector<T>) -> Self {
        TwistorVector { vertical, horizontal }
    }

    pub fn flat(&self) -> DVector<T> {
        let v = self.vertical.coordinates();
        DVector::from_iterator(v.len() + self.horizontal.len(), v.iter().chain(self.horizontal.iter()).copied())
    }
}

/// The model `(T_S Z, h_t)` with its bracket data.
#[derive(Clone, Debug)]
pub struct TwistorFrame<'a, T: Real> {
    model: &'a CurvatureModel<T>,
    point: AdaptedPoint<T>,
    t: T,
    vertical_scale: T,
    family: Vec<DMatrix<T>>,
    forms: Vec<DMatrix<T>>,
}

impl<'a, T: Real> TwistorFrame<'a, T> {
    /// Vertical metric `t/κ` (or `t` when `κ ≤ 0`).
    pub fn new(model: &'a CurvatureModel<T>, point: FibrePoint<T>, t: T) -> Result<Self> {
        let scale = model.fibre_metric().scale;
        Self::with_fibre_scale(model, point, t, scale)
    }

    pub fn with_fibre_scale(model: &'a CurvatureModel<T>, point: FibrePoint<T>, t: T, scale: T) -> Result<Self> {
        if t <= T::zero() || scale <= T::zero() {
            return Err(Error::HypothesisNotMet("vertical metric scale must be positive".into()));
        }
        let point = model.adapt(point)?;
        let family = point.vertical_family(model.rep())?;
        let forms = model.vertical_bracket_forms(&point)?;
        Ok(TwistorFrame { model, point, t, vertical_scale: t * scale, family, forms })
    }

    pub fn model(&self) -> &CurvatureModel<T> {
        self.model
    }

    pub fn point(&self) -> &AdaptedPoint<T> {
        &self.point
    }

    pub fn t(&self) -> T {
        self.t
    }

    /// Coefficient of the vertical block of `h_t`.
    pub fn vertical_scale(&self) -> T {
        self.vertical_scale
    }

    pub fn vertical_dim(&self) -> usize {
        self.family.len()
    }

    pub fn horizontal_dim(&self) -> usize {
        self.model.dim()
    }

    pub fn total_dim(&self) -> usize {
        self.vertical_dim() + self.horizontal_dim()
    }

    /// `φ` of the vertical basis, in coordinate order.
    pub fn vertical_family(&self) -> &[DMatrix<T>] {
        &self.family
    }

    /// `W_k` with `[X, Y]` having vertical coordinate `X^T W_k Y`.
    pub fn bracket_forms(&self) -> &[DMatrix<T>] {
        &self.forms
    }

    pub fn split(&self, w: &DVector<T>) -> (DVector<T>, DVector<T>) {
        let dv = self.vertical_dim();
        (w.rows(0, dv).into_owned(), w.rows(dv, self.horizontal_dim()).into_owned())
    }

    pub fn join(&self, v: &DVector<T>, x: &DVector<T>) -> DVector<T> {
        DVector::from_iterator(v.len() + x.len(), v.iter().chain(x.iter()).copied())
    }

    pub fn to_vector(&self, w: &DVector<T>) -> TwistorVector<T> {
        let (v, x) = self.split(w);
        TwistorVector { vertical: FibreTangent::from_coordinates(v).expect("even vertical dimension"), horizontal: x }
    }

    fn check_len(&self, w: &DVector<T>) -> Result<()> {
        if w.len() != self.total_dim() {
            return Err(Error::DimensionMismatch { expected: self.total_dim(), actual: w.len() });
        }
        Ok(())
    }

    /// `h_t(a, b)`.
    pub fn inner(&self, a: &DVector<T>, b: &DVector<T>) -> T {
        let dv = self.vertical_dim();
        let v = a.rows(0, dv).dot(&b.rows(0, dv));
        let h = a.rows(dv, self.horizontal_dim()).dot(&b.rows(dv, self.horizontal_dim()));
        v * self.vertical_scale + h
    }

    pub fn norm(&self, a: &DVector<T>) -> T {
        self.inner(a, a).sqrt()
    }

    /// `φ(u)` for vertical coordinates `u`.
    pub fn phi_vertical(&self, u: &DVector<T>) -> DMatrix<T> {
        let n = self.horizontal_dim();
        let mut out = DMatrix::zeros(n, n);
        for (j, c) in self.family.iter().zip(u.iter()) {
            if *c != T::zero() {
                out += j * *c;
            }
        }
        out
    }

    /// The structure applied to a flat vector.
    pub fn apply(&self, which: Structure, w: &DVector<T>) -> DVector<T> {
        let (v, x) = self.split(w);
        let mut jv = fibre_acs(&FibreTangent::from_coordinates(v).expect("even")).coordinates().clone();
        if which == Structure::Variation {
            jv.neg_mut();
        }
        self.join(&jv, &(self.point.phi() * x))
    }

    /// `𝒥(U + X) = S·U + φ(S)X`.
    pub fn acs(&self, w: &TwistorVector<T>) -> Result<TwistorVector<T>> {
        let flat = w.flat();
        self.check_len(&flat)?;
        Ok(self.to_vector(&self.apply(Structure::Twistor, &flat)))
    }

    /// `𝒥̃ = -𝒥` on `V`, `𝒥` on `H`.
    pub fn acs_variation(&self, w: &TwistorVector<T>) -> Result<TwistorVector<T>> {
        let flat = w.flat();
        self.check_len(&flat)?;
        Ok(self.to_vector(&self.apply(Structure::Variation, &flat)))
    }

    /// Matrix of the structure on flat vectors.
    pub fn structure_matrix(&self, which: Structure) -> DMatrix<T> {
        let d = self.total_dim();
        let mut m = DMatrix::zeros(d, d);
        for k in 0..d {
            let mut e = DVector::zeros(d);
            e[k] = T::one();
            m.set_column(k, &self.apply(which, &e));
        }
        m
    }

    /// Bracket of the frame fields extended with constant coefficients.
    pub fn frame_bracket(&self, e: &DVector<T>, f: &DVector<T>) -> DVector<T> {
        let (_, ex) = self.split(e);
        let (_, fx) = self.split(f);
        let v = DVector::from_iterator(self.forms.len(), self.forms.iter().map(|w| ex.dot(&(w * &fx))));
        self.join(&v, &DVector::zeros(self.horizontal_dim()))
    }

    /// Christoffel part `Γ_E F` of `∇^t` at the model point.
    pub fn christoffel(&self, e: &DVector<T>, f: &DVector<T>) -> DVector<T> {
        let (ev, ex) = self.split(e);
        let (fv, fx) = self.split(f);
        let half = T::lit(0.5);
        let v = DVector::from_iterator(self.forms.len(), self.forms.iter().map(|w| ex.dot(&(w * &fx)) * half));
        let n = self.horizontal_dim();
        let mut x = DVector::zeros(n);
        for (k, w) in self.forms.iter().enumerate() {
            if fv[k] != T::zero() {
                x += w * &ex * fv[k];
            }
            if ev[k] != T::zero() {
                x += w * &fx * ev[k];
            }
        }
        self.join(&v, &(x * (self.vertical_scale * half)))
    }

    /// O'Neill's `A_X Y = ½ 𝒱[X, Y]` for horizontal `X, Y`, through
    /// `φ^{-1}(-½ [R_{X,Y}, S])`.
    pub fn oneill_a(&self, x: &DVector<T>, y: &DVector<T>) -> Result<FibreTangent<T>> {
        let m = self.model.curv_bracket(x, y, &self.point)? * T::lit(-0.5);
        self.model.vertical_pullback(&m, &self.point, T::lit(1e-9))
    }

    /// `(D_E 𝒥) F`: the structure varies only through `φ(S)` along
    /// vertical directions.
    pub fn structure_derivative(&self, e: &DVector<T>, f: &DVector<T>) -> DVector<T> {
        let (ev, _) = self.split(e);
        let (_, fx) = self.split(f);
        self.join(&DVector::zeros(self.vertical_dim()), &(self.phi_vertical(&ev) * fx))
    }

    /// `(∇_E 𝒥) F = Γ_E(𝒥F) + (D_E 𝒥)F - 𝒥 Γ_E F`.
    pub fn structure_covariant_derivative(&self, which: Structure, e: &DVector<T>, f: &DVector<T>) -> DVector<T> {
        let jf = self.apply(which, f);
        self.christoffel(e, &jf) + self.structure_derivative(e, f) - self.apply(which, &self.christoffel(e, f))
    }

    /// Nijenhuis tensor from the torsion-free connection:
    /// `(∇_{JE}J)F - (∇_{JF}J)E - J(∇_E J)F + J(∇_F J)E`.
    pub fn nijenhuis_via_connection(&self, which: Structure, e: &DVector<T>, f: &DVector<T>) -> DVector<T> {
        let (je, jf) = (self.apply(which, e), self.apply(which, f));
        self.structure_covariant_derivative(which, &je, f) - self.structure_covariant_derivative(which, &jf, e)
            - self.apply(which, &self.structure_covariant_derivative(which, e, f))
            + self.apply(which, &self.structure_covariant_derivative(which, f, e))
    }

    /// Nijenhuis tensor from field brackets of the frame extensions:
    /// `[JE, JF] - J[JE, F] - J[E, JF] - [E, F]`.
    pub fn nijenhuis_via_brackets(&self, which: Structure, e: &DVector<T>, f: &DVector<T>) -> Result<DVector<T>> {
        let fe = ModelField::constant(self, e.clone())?;
        let ff = ModelField::constant(self, f.clone())?;
        let je = fe.structure_image(self, which);
        let jf = ff.structure_image(self, which);
        Ok(self.field_bracket(&je, &jf)
            - self.apply(which, &self.field_bracket(&je, &ff))
            - self.apply(which, &self.field_bracket(&fe, &jf))
            - self.field_bracket(&fe, &ff))
    }

    /// `∇^t_E F` for model fields.
    pub fn connection(&self, e: &ModelField<T>, f: &ModelField<T>) -> DVector<T> {
        self.christoffel(e.value(), f.value()) + f.jet() * e.value()
    }

    /// `[E, F]` for model fields.
    pub fn field_bracket(&self, e: &ModelField<T>, f: &ModelField<T>) -> DVector<T> {
        self.frame_bracket(e.value(), f.value()) + f.jet() * e.value() - e.jet() * f.value()
    }

    /// `∇_E F - ∇_F E - [E, F]`.
    pub fn torsion(&self, e: &ModelField<T>, f: &ModelField<T>) -> DVector<T> {
        self.connection(e, f) - self.connection(f, e) - self.field_bracket(e, f)
    }

    /// `E h(F, G) - h(∇_E F, G) - h(F, ∇_E G)`.
    pub fn metric_defect(&self, e: &ModelField<T>, f: &ModelField<T>, g: &ModelField<T>) -> T {
        let derivative = self.inner(&(f.jet() * e.value()), g.value()) + self.inner(f.value(), &(g.jet() * e.value()));
        derivative - self.inner(&self.connection(e, f), g.value()) - self.inner(f.value(), &self.connection(e, g))
    }
}

/// `∇^t_E F` (see [`TwistorFrame::connection`]); `t` is the frame's scale.
pub fn connection_t<T: Real>(frame: &TwistorFrame<'_, T>, e: &ModelField<T>, f: &ModelField<T>) -> DVector<T> {
    frame.connection(e, f)
}
