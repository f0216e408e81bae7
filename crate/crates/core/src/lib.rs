//! Exact computations with extremal elements of Lie algebras: the tensor
//! model of the symplectic Lie algebra, extremal forms, sl2-geometries, and
//! recognition of symplectic Lie algebras from their extremal generators.
//!
//! All arithmetic is exact over `F_p`, `F_{p^2}` or `Q`.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod extremal;
pub mod field;
pub mod geometry;
pub mod linalg;
pub mod recognition;
pub mod report;
pub mod suites;
pub mod symplectic;
pub mod tensor;

pub use algebra::StructureLieAlgebra;
pub use error::{Error, Result};
pub use field::{FieldSpec, Scalar};
pub use linalg::{Mat, Subspace, Vector};
pub use symplectic::SymplecticSpace;
pub use tensor::SfElement;
