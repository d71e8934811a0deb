//! Exact and floating arithmetic in `Cl(r)` with the negative-definite
//! convention `e_i^2 = -1`.

mod blade;
mod canonical;
mod multivector;
mod text;

pub(crate) use canonical::orthogonalize;

pub use blade::{BladeIndex, MAX_RANK};
pub use canonical::{
    bivector_coordinates, bivector_from_coordinates, bivector_from_skew, canonical_bivector_form,
    rotate_bivector, skew_matrix, wedge_vectors, CanonicalBivector,
};
pub use multivector::{geometric_product, is_decomposable, is_unit, squares_to_minus_one, wedge, MultiVector};
pub use text::{blade_label, parse_multivector};
