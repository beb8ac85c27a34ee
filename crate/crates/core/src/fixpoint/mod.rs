//! Fixed-point constructions: the `A_n` sequence for `QK + □^{n+1}⊥`, and
//! explicit fixed points of Σ-formulas and Boolean combinations of them
//! for QGL.

mod qk;
mod sigma;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::SyntaxError;

pub use qk::{b_n_transform, fixpoint_qk, FixpointTrace};
pub use sigma::{
    boolean_sigma_fixpoint, sigma_fixpoint, simultaneous_sigma_fixpoints, Derivation, Rule, SigmaFixpointResult,
    SimultaneousResult,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixpointError {
    #[error("#{hole} occurs outside the scope of every box")]
    NotModalized { hole: String },
    #[error("variables {} occur both free and bound; normalize first", .vars.iter().cloned().collect::<Vec<_>>().join(", "))]
    NotNormalized { vars: BTreeSet<String> },
    #[error("not a Σ-formula: `{formula}`")]
    NotSigma { formula: String },
    #[error("variable clash: {0}")]
    VariableClash(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
}

impl FixpointError {
    pub fn code(&self) -> &'static str {
        match self {
            FixpointError::NotModalized { .. } => "not-modalized",
            FixpointError::NotNormalized { .. } => "not-normalized",
            FixpointError::NotSigma { .. } => "not-sigma",
            FixpointError::VariableClash(_) => "variable-clash",
            FixpointError::Syntax(e) => e.code(),
        }
    }
}

fn check_normalized(f: &crate::syntax::Formula) -> Result<(), FixpointError> {
    let vs = crate::syntax::free_and_bound_vars(f);
    let clash: BTreeSet<String> = vs.free.intersection(&vs.bound).cloned().collect();
    if clash.is_empty() {
        Ok(())
    } else {
        Err(FixpointError::NotNormalized { vars: clash })
    }
}
