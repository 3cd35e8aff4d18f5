use thiserror::Error;

/// Failures raised by the numerical core. Every variant names the violated
/// precondition together with the offending value.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("kernel center modulus {modulus} exceeds the admissible maximum {max}")]
    KernelCenterTooLarge { modulus: f64, max: f64 },
    #[error("kernel exponent must be positive and finite, got {0}")]
    InvalidKernelExponent(f64),
    #[error("truncation degree {degree} is smaller than the polynomial degree {required}")]
    DegreeTooSmall { degree: usize, required: usize },
    #[error("point with modulus {modulus} lies outside the closed unit disc")]
    PointOutsideClosedDisc { modulus: f64 },
    #[error("point with modulus {modulus} lies outside the open unit disc")]
    PointOutsideOpenDisc { modulus: f64 },
    #[error("criterion center with modulus {modulus} lies outside the open unit disc")]
    CenterOutsideOpenDisc { modulus: f64 },
    #[error("result degree {degree} exceeds the maximum degree {max}")]
    MaxDegreeExceeded { degree: usize, max: usize },
    #[error("not a self-map of the disc: boundary sup {boundary_sup} exceeds 1 + {tolerance:e}")]
    NotSelfMap { boundary_sup: f64, tolerance: f64 },
    #[error("radius {0} is outside (0, 1]")]
    InvalidRadius(f64),
    #[error("exponent p = {0} must be finite and at least 1")]
    InvalidExponent(f64),
    #[error("exponents must satisfy q >= p, got p = {p}, q = {q}")]
    ExponentOrder { p: f64, q: f64 },
    #[error("derivative order {0} is not one of 0, 1, 2")]
    InvalidDerivativeOrder(usize),
    #[error("boundary grid size {0} is not a positive power of two")]
    InvalidGridSize(usize),
    #[error("test family is empty")]
    EmptyFamily,
    #[error("test family member {index} has zero norm in the input space")]
    ZeroNormMember { index: usize },
    #[error("basis size {size} must be between 1 and {max}")]
    BasisTooLarge { size: usize, max: usize },
    #[error("number of radial levels must be at least 1")]
    NoLevels,
    #[error("function spec is empty: {0}")]
    EmptySpec(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
