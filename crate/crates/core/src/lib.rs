#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Numerical core for Hardy-type spaces on the unit disc.
//!
//! Functions are truncated Taylor series of functions analytic on a disc of
//! radius greater than one. On top of that sit boundary quadrature, the
//! H^p / S^p / S_2^p norms, the weighted composition, Volterra and integral
//! operators, and the Carleson-type criterion functionals used to test their
//! boundedness and compactness.
//!
//! The crate only needs `alloc`; IO and file formats live in `hardylab`.

extern crate alloc;

pub mod carleson;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod numeric;
pub mod operators;
pub mod series;
pub mod spaces;

pub use carleson::{criterion_sup, criterion_value, CriterionReport, CriterionSpec};
pub use error::{Error, Result};
pub use grid::{boundary_samples, boundary_sup, BoundaryGrid, SelfMap};
pub use num_complex::Complex64;
pub use operators::OperatorSpec;
pub use series::{AnalyticFunction, FunctionSpec};
pub use spaces::{NormParams, Space};
