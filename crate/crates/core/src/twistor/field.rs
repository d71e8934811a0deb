use nalgebra::{DMatrix, DVector};

use super::{Structure, TwistorFrame};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// A vector field of the pointwise model: its value at `S` and its first
/// jet `D_E F = jet · E` in frame coefficients.
///
/// Supported fields are the frame fields with constant coefficients and
/// their images under the structures, whose horizontal coefficients vary
/// along the fibre through `φ(S)`. Jets are therefore confined to the
/// horizontal-rows × vertical-columns block.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelField<T: Real> {
    value: DVector<T>,
    jet: DMatrix<T>,
}

impl<T: Real> ModelField<T> {
    pub fn new(frame: &TwistorFrame<'_, T>, value: DVector<T>, jet: DMatrix<T>) -> Result<Self> {
        let d = frame.total_dim();
        if value.len() != d || jet.nrows() != d || jet.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: value.len() });
        }
        let dv = frame.vertical_dim();
        for i in 0..d {
            for j in 0..d {
                let supported = i >= dv && j < dv;
                if !supported && jet[(i, j)] != T::zero() {
                    return Err(Error::UnsupportedField(
                        "only horizontal coefficients varying along the fibre are modelled",
                    ));
                }
            }
        }
        Ok(ModelField { value, jet })
    }

    /// Basic horizontal / adapted-constant vertical extension.
    pub fn constant(frame: &TwistorFrame<'_, T>, value: DVector<T>) -> Result<Self> {
        let d = frame.total_dim();
        Self::new(frame, value, DMatrix::zeros(d, d))
    }

    pub fn value(&self) -> &DVector<T> {
        &self.value
    }

    pub fn jet(&self) -> &DMatrix<T> {
        &self.jet
    }

    /// `J F` as a field: value `J F(S)`, jet `J · jet + (D J) F`.
    pub fn structure_image(&self, frame: &TwistorFrame<'_, T>, which: Structure) -> Self {
        let d = frame.total_dim();
        let j = frame.structure_matrix(which);
        let mut jet = &j * &self.jet;
        for k in 0..frame.vertical_dim() {
            let mut e = DVector::zeros(d);
            e[k] = T::one();
            jet.set_column(k, &(jet.column(k) + frame.structure_derivative(&e, &self.value)));
        }
        ModelField { value: j * &self.value, jet }
    }
}
