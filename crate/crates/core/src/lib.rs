pub mod clifford;
pub mod curvature;
pub mod error;
pub mod fibre;
pub mod linalg;
pub mod repmat;
pub mod sampling;
pub mod twistor;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Coefficient, Real};
