//! Exact structure-constant computations for coquasi-Hopf algebras, their
//! comodule algebras, crossed products, cleft extensions and Hopf modules.

pub mod catalog;
pub mod cleft;
pub mod comodule;
pub mod coquasi;
pub mod crossed;
pub mod hopf_modules;
pub mod linear;
pub mod report;
pub mod scalar;

pub use linear::{Algebra, Coalgebra, Functional, LinMap, Matrix, Space, VMap, Vector};
pub use report::Report;
pub use scalar::{FieldSpec, Scalar};
