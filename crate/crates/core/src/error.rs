use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grade overflow: {0} + {1} exceeds 6")]
    GradeOverflow(usize, usize),

    #[error("grade {got} is below the minimum {min} for this operation")]
    GradeTooLow { got: usize, min: usize },

    #[error("grade {got} is above the maximum {max} for this operation")]
    GradeTooHigh { got: usize, max: usize },

    #[error("expected a form of grade {expected}, got grade {got}")]
    WrongGrade { expected: usize, got: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("volume form is zero")]
    ZeroVolume,

    #[error("2-form is degenerate and does not define a symplectic structure")]
    DegenerateSymplectic,

    #[error("form is not effective")]
    NotEffective,

    #[error("form is degenerate (pfaffian vanishes)")]
    Degenerate,

    #[error("value has no exact representation on this backend: {0}")]
    NotExact(String),

    #[error("singular matrix")]
    Singular,

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("invariants match no orbit in the classification: {0}")]
    OutsideTable(String),

    #[error("pfaffian changes sign over the sample set (branch change)")]
    BranchChange,

    #[error("operation requires polynomial coefficients")]
    NotPolynomial,

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
