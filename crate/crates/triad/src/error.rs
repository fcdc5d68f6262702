//! Crate-wide error type.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or configuration constraint failed at construction.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A concentration argument was negative.
    #[error("negative concentration: {name} = {value}")]
    NegativeConcentration { name: &'static str, value: f64 },

    /// An argument fell outside the domain of the operation.
    #[error("{name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// A growth curve of the wrong kinetic class was supplied.
    #[error("kinetic class mismatch: expected {expected}, found {found}")]
    ClassMismatch {
        expected: &'static str,
        found: &'static str,
    },

    /// The operation is only defined for the other hydrolysis variant.
    #[error("operation requires {required} hydrolysis")]
    WrongHydrolysis { required: &'static str },

    /// A break-even concentration needed by the operation is undefined.
    #[error("break-even concentration {name} undefined: {reason}")]
    BreakEvenUndefined { name: &'static str, reason: String },

    /// A bracketed root solve failed or left too large a residual.
    #[error("root solve failed: {0}")]
    RootSolve(String),

    /// The matrix is missing the expected block-triangular zero pattern.
    #[error("expected structural zero at row {row}, col {col}, found {value}")]
    BlockPattern { row: usize, col: usize, value: f64 },

    /// A persistence branch index beyond the computed multiplicity.
    #[error("equilibrium branch k = {k} absent (N = {n})")]
    BranchAbsent { k: usize, n: usize },

    /// The equilibrium record does not exist for these parameters.
    #[error("equilibrium {label} does not exist for these parameters")]
    NonExistentEquilibrium { label: String },

    /// Adaptive integration drove the step size below resolution.
    #[error("integration step underflow at t = {t} (h = {h})")]
    StepUnderflow { t: f64, h: f64 },
}
