use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("region is unbounded")]
    UnboundedRegion,
    #[error("polytope has zero volume")]
    DegeneratePolytope,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("vector is not in the support of the fan")]
    NotInSupport,
    #[error("vector is already a ray of the fan")]
    AlreadyARay,
    #[error("vector is not primitive")]
    NonPrimitive,
    #[error("star subdivision at this vector is not smooth")]
    SingularSubdivision,
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("divisor is not nef and the fan has no ample class to split it")]
    NotNefAndNotDecomposable,
    #[error("divisor is not pseudo-effective")]
    NotPseudoEffective,
    #[error("divisor is not ample")]
    NotAmple,
    #[error("divisor is not big")]
    NotBig,
    #[error("direction divisor is zero")]
    ZeroDivisor,
    #[error("pseudo-effective threshold is infinite")]
    UnboundedThreshold,
    #[error("volume curve is not monotone")]
    NotMonotone,
    #[error("tau {0} is outside the feasible range of the flag ideal")]
    InfeasibleTau(String),
    #[error("test curve range is too short for truncation")]
    RangeTooShort,
    #[error("parameter {0} is out of range")]
    OutOfRange(String),
    #[error("family is not big on the unit interval")]
    NotBigOnUnitInterval,
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable snake-case name of the variant, for machine-readable output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnboundedRegion => "unbounded_region",
            Error::DegeneratePolytope => "degenerate_polytope",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::ZeroVector => "zero_vector",
            Error::NotInSupport => "not_in_support",
            Error::AlreadyARay => "already_a_ray",
            Error::NonPrimitive => "non_primitive",
            Error::SingularSubdivision => "singular_subdivision",
            Error::InvalidFan(_) => "invalid_fan",
            Error::NotNefAndNotDecomposable => "not_nef_and_not_decomposable",
            Error::NotPseudoEffective => "not_pseudo_effective",
            Error::NotAmple => "not_ample",
            Error::NotBig => "not_big",
            Error::ZeroDivisor => "zero_divisor",
            Error::UnboundedThreshold => "unbounded_threshold",
            Error::NotMonotone => "not_monotone",
            Error::InfeasibleTau(_) => "infeasible_tau",
            Error::RangeTooShort => "range_too_short",
            Error::OutOfRange(_) => "out_of_range",
            Error::NotBigOnUnitInterval => "not_big_on_unit_interval",
            Error::Inconsistent(_) => "inconsistent",
            Error::Parse(_) => "parse",
            Error::InvalidInput(_) => "invalid_input",
        }
    }
}
