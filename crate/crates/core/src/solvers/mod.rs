//! Exact decision and optimization procedures over enumerated paths and
//! interdiction scenarios.

mod engine;
mod integral;
mod maxflow;
mod mrf;
mod restricted;
mod search;
mod witness;

use crate::instances::PathFlow;
use crate::lp::LinearProgram;
use crate::rational::Rational;

pub use integral::{decide_integral_mrf_r_star, solve_integral_mrf};
pub use maxflow::{max_flow, max_flow_arcs, min_cut};
pub use mrf::{
    best_response, decide_mrf_star, decide_mrf_star_run, decide_rni_star, mrf_k1_lp, mrf_primal_lp, rni_dual_lp,
    solve_mrf, solve_mrf_k1, solve_rni, MrfSolution, RniSolution,
};
pub use restricted::{
    decide_mrf_m_star, decide_mrf_m_star_run, decide_mrf_r_star, decide_mrf_r_star_run, optimize_multicommodity,
};
pub use witness::{check_mrf_m_witness, check_mrf_r_witness, check_mrf_witness, WitnessReport};

/// A yes/no answer with the optimum it was read from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub yes: bool,
    /// The optimum compared against the threshold.
    pub value: Rational,
    /// A flow certifying a YES answer; `None` on NO, or when the explicit
    /// form would exceed the path limit.
    pub witness: Option<PathFlow>,
}

/// Outcome of a path-program decision together with the last program solved.
#[derive(Debug, Clone)]
pub struct DecisionRun {
    pub decision: Decision,
    pub lp: LinearProgram,
}
