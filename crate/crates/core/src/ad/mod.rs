//! Forward-mode differentiation by truncated Taylor jets.

pub mod fields;
pub mod jet;
pub mod tensor;

pub use fields::{hessian_y, partial, third_y, CovectorField, MatrixField, ScalarField};
pub use jet::{Jet, Table, MAX_ORDER};
pub use tensor::{JVec, PiTensor};
