use core::fmt;

/// Which of the Gutiérrez phase constraints failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GutierrezConstraint {
    /// `0 < mu1`
    PositiveStrongShear,
    /// `mu1 = -(lambda2 + mu2)`
    WeakBulkBalance,
    /// `mu1 < mu2`
    ShearOrdering,
    /// `lambda1 + mu1 > 0`
    StrongBulkPositive,
}

impl fmt::Display for GutierrezConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::PositiveStrongShear => "0 < mu1",
            Self::WeakBulkBalance => "mu1 = -(lambda2 + mu2)",
            Self::ShearOrdering => "mu1 < mu2",
            Self::StrongBulkPositive => "lambda1 + mu1 > 0",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("phase constraint violated: {constraint}")]
    ConstraintViolation { constraint: GutierrezConstraint },
    #[error("shear modulus must be positive, got {0}")]
    NonPositiveMu(f64),
    #[error("band width theta*n = {width} is not an integer number of pixels")]
    NonIntegerBandWidth { width: f64 },
    #[error("checkerboard needs an even cell size, got n = {0}")]
    OddN(usize),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },
    #[error("disk packing stalled at volume fraction {achieved}")]
    PackingStalled { achieved: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("solver did not converge: residual {residual:e} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },
    #[error("nonpositive curvature direction with Rayleigh quotient {rayleigh_quotient}")]
    IndefinitenessDetected { rayleigh_quotient: f64 },
    #[error("cell problem is degenerate (Rayleigh quotient {rayleigh_quotient} at shift {shift})")]
    DegenerateCell { shift: f64, rayleigh_quotient: f64 },
    #[error("laminate system is singular along ({}, {})", null_direction[0], null_direction[1])]
    SingularSystem { null_direction: [f64; 2] },
    #[error("shift {shift} does not stay below lambda6 = {lambda6}")]
    ShiftExceedsLambda6 { shift: f64, lambda6: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
