//! Testers and proper learners, all run against a [`QueryOracle`] that
//! enforces the classic, active or passive access model.
//!
//! Every tester returns a [`Verdict`]. Budget exhaustion and failures of the
//! active pool to supply the structure a tester needs give
//! [`Decision::Inconclusive`]; they are never folded into accept or reject.
//! Model violations are programming errors and surface as [`Error`]s.

mod blr;
mod junta;
mod learners;
mod linear;
mod oracle;
mod symmetric;

pub use blr::{blr_exact_acceptance, blr_far_bound, blr_fourier_acceptance, blr_k_test, DEFAULT_REPETITIONS};
pub use junta::{junta_passive_tester, junta_sample_size, JUNTA_SAMPLE_CONSTANT, MAX_JUNTA_K, MAX_JUNTA_N};
pub use learners::{
    learn_consistent, learn_then_verify, learn_via_net, net_sample_size, verification_size, Learner,
};
pub use linear::{
    active_linear_query_size, active_linear_tester, fit_linear, passive_linear_tester,
    passive_polynomial_tester, LinearFit, DEFAULT_SURPLUS, MAX_POLY_SOLVER_COLUMNS,
};
pub use oracle::{Model, ModelKind, QueryOracle};
pub use symmetric::{
    collision_probability, psf_active_pair_count, psf_consistency_check, psf_passive_sample_size, psf_tester,
    symmetric_passive_sample_size, symmetric_tester, tolerant_symmetric_tester, violation_rate_at,
    MAX_PSF_K, PSF_CONSTANT,
};

use serde::{Deserialize, Serialize};

use crate::boolfn::{BitVector, BooleanFunction};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
    Inconclusive,
}

impl std::fmt::Display for Decision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decision::Accept => "accept",
            Decision::Reject => "reject",
            Decision::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub decision: Decision,
    pub queries_used: usize,
    pub transcript: Option<Vec<(BitVector, bool)>>,
    /// Free-form notes: vacuous accepts, inconclusive causes, sizes used.
    pub diagnostics: Vec<String>,
}

impl Verdict {
    pub(crate) fn of(decision: Decision, oracle: &QueryOracle, diagnostics: Vec<String>) -> Self {
        Self {
            decision,
            queries_used: oracle.spent(),
            transcript: Some(oracle.transcript().to_vec()),
            diagnostics,
        }
    }

    pub fn is_accept(&self) -> bool {
        self.decision == Decision::Accept
    }

    pub fn is_reject(&self) -> bool {
        self.decision == Decision::Reject
    }
}

/// Maps budget exhaustion to an inconclusive verdict and passes every other
/// outcome through.
pub(crate) fn settle(oracle: &QueryOracle, run: Result<Verdict>) -> Result<Verdict> {
    match run {
        Err(Error::BudgetExhausted { budget }) => Ok(Verdict::of(
            Decision::Inconclusive,
            oracle,
            vec![format!("query budget of {budget} exhausted")],
        )),
        other => other,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnerOutput {
    pub hypothesis: BooleanFunction,
    pub samples_used: usize,
    /// Whether the hypothesis is a member of the target family.
    pub proper: bool,
}
