//! Exact sparse multivariate polynomials over `Q` and prime fields.

mod context;
mod monomial;
mod parse;
mod polynomial;
mod root;

use serde::Serialize;
use thiserror::Error;

use crate::field::FieldError;

pub use context::{indexed_names, Ctx, PolyContext};
pub use monomial::Monomial;
pub use parse::{parse, parse_with_inferred_context, tokenize_identifiers};
pub use polynomial::{Polynomial, Substitution};
pub use root::{mth_root, MthRoot};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("invalid variable name `{0}`")]
    BadVariableName(String),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("polynomials live in different contexts")]
    ContextMismatch,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable `{0}` already occurs in the polynomial")]
    VariablePresent(String),
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("not a power with exponent {m}: obstruction at monomial {witness}")]
    NotAPower { m: u32, witness: String },
    #[error("input polynomial is zero")]
    ZeroInput,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Outcome of checking a polynomial identity: `Fail` keeps the nonzero
/// difference between the two sides.
#[derive(Debug, Clone, PartialEq)]
pub enum VerificationResult {
    Pass,
    Fail { residual: Polynomial },
}

impl VerificationResult {
    /// `Pass` iff `difference` is the zero polynomial.
    pub fn from_difference(difference: Polynomial) -> Self {
        if difference.is_zero() {
            VerificationResult::Pass
        } else {
            VerificationResult::Fail {
                residual: difference,
            }
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, VerificationResult::Pass)
    }

    pub fn residual(&self) -> Option<&Polynomial> {
        match self {
            VerificationResult::Pass => None,
            VerificationResult::Fail { residual } => Some(residual),
        }
    }
}

impl Serialize for VerificationResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(2))?;
        match self {
            VerificationResult::Pass => {
                map.serialize_entry("verdict", "pass")?;
                map.serialize_entry("residual", "0")?;
            }
            VerificationResult::Fail { residual } => {
                map.serialize_entry("verdict", "fail")?;
                map.serialize_entry("residual", &residual.to_string())?;
            }
        }
        map.end()
    }
}

impl std::fmt::Display for VerificationResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerificationResult::Pass => write!(f, "pass"),
            VerificationResult::Fail { residual } => write!(f, "fail (residual {residual})"),
        }
    }
}
