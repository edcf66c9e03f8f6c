//! End-to-end drivers: certify a reduced instance, solve it, and lift the
//! result back to a general matrix.

use serde::{Deserialize, Serialize};

use crate::certify::{build_event_graph, CertificateReport, EventGraph};
use crate::model::{compute_parameters, stratify, InputMatrix, ReducedInstance};
use crate::reduction::{lift_assignment, reduce_general, validate_general, LiftedReport, ReductionError};
use crate::solver::{moser_tardos, SolveResult};
use crate::Error;

/// Stratifies `a`, builds its event graph and runs the local-lemma check.
pub fn certify_reduced(a: &ReducedInstance) -> Result<(EventGraph, CertificateReport), Error> {
    let params = compute_parameters(a.beta(), a.delta())?;
    let strata = stratify(a, &params)?;
    let mut graph = build_event_graph(&strata, &params);
    let report = graph.certify();
    Ok((graph, report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedSolve {
    pub certificate: CertificateReport,
    pub result: SolveResult,
}

/// Certifies and then resamples. Fails if certification does not pass.
pub fn solve_reduced(a: &ReducedInstance, seed: u64, max_rounds: u64) -> Result<ReducedSolve, Error> {
    let (graph, certificate) = certify_reduced(a)?;
    certificate.ensure_pass()?;
    let result = moser_tardos(a, &graph, seed, max_rounds)?;
    Ok(ReducedSolve { certificate, result })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralSolve {
    pub reduced: ReducedSolve,
    pub lifted: LiftedReport,
}

/// Validates `v`, reduces, solves the reduced instance and lifts the signs back.
pub fn solve_general(v: &InputMatrix, seed: u64, max_rounds: u64) -> Result<GeneralSolve, Error> {
    let checked = validate_general(v.clone()).map_err(ReductionError::Invalid)?;
    let a = reduce_general(&checked)?;
    let reduced = solve_reduced(&a, seed, max_rounds)?;
    let lifted = lift_assignment(v, &a, reduced.result.y.clone(), reduced.result.achieved)?;
    Ok(GeneralSolve { reduced, lifted })
}
