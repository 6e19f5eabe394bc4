use std::num::NonZeroU32;

use highs::{HighsModelStatus, HighsSolutionStatus, RowProblem, Sense as HighsSense};

use super::backend::{Capabilities, IlpSolution, SolveParams, SolveStatus, SolverBackend};
use super::model::{IlpModel, Sense, VarKind};
use crate::error::{Error, Result};

/// In-process MILP and LP solver backed by HiGHS.
#[derive(Clone, Copy, Debug, Default)]
pub struct HighsBackend;

impl SolverBackend for HighsBackend {
    fn name(&self) -> &str {
        "highs"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            milp: true,
            lp_relaxation: true,
            time_limit: true,
            threads: true,
        }
    }

    fn solve(&self, model: &IlpModel, params: &SolveParams) -> Result<IlpSolution> {
        if params.time_limit.is_some_and(|t| t.is_zero()) {
            return Ok(IlpSolution::without_assignment(SolveStatus::Timeout));
        }
        let mut pb = RowProblem::default();
        let cols: Vec<_> = model
            .variables
            .iter()
            .map(|v| {
                let integer = v.kind == VarKind::Binary && !params.relax;
                let upper = match (v.kind, v.upper) {
                    (VarKind::Binary, _) => 1.0,
                    (_, Some(u)) => u,
                    (_, None) => f64::INFINITY,
                };
                pb.add_column_with_integrality(v.obj, v.lower..=upper, integer)
            })
            .collect();
        for row in &model.constraints {
            let terms: Vec<_> = row.terms.iter().map(|&(i, a)| (cols[i], a)).collect();
            match row.sense {
                Sense::Le => pb.add_row(..=row.rhs, terms),
                Sense::Ge => pb.add_row(row.rhs.., terms),
                Sense::Eq => pb.add_row(row.rhs..=row.rhs, terms),
            }
        }
        let mut hm = pb
            .try_optimise(HighsSense::Minimise)
            .map_err(|e| Error::ModelRejected(format!("HiGHS refused the model: {e:?}")))?;
        hm.make_quiet();
        hm.set_option("mip_rel_gap", params.mip_rel_gap);
        if let Some(limit) = params.time_limit {
            hm.set_option("time_limit", limit.as_secs_f64());
        }
        if let Some(threads) = params.threads.and_then(|t| NonZeroU32::new(t as u32)) {
            hm.set_threads(threads);
        }
        let solved = hm
            .try_solve()
            .map_err(|e| Error::ModelRejected(format!("HiGHS failed: {e:?}")))?;
        let has_primal = solved.primal_solution_status() == HighsSolutionStatus::Feasible;
        let status = match solved.status() {
            HighsModelStatus::Optimal => SolveStatus::Optimal,
            HighsModelStatus::Infeasible | HighsModelStatus::UnboundedOrInfeasible => {
                SolveStatus::Infeasible
            }
            HighsModelStatus::ReachedTimeLimit
            | HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ReachedInterrupt => {
                if has_primal {
                    SolveStatus::Feasible
                } else {
                    SolveStatus::Timeout
                }
            }
            HighsModelStatus::ModelEmpty => SolveStatus::Optimal,
            other => {
                return Err(Error::ModelRejected(format!(
                    "HiGHS ended with status {other:?}"
                )))
            }
        };
        if !matches!(status, SolveStatus::Optimal | SolveStatus::Feasible) {
            return Ok(IlpSolution::without_assignment(status));
        }
        let values = solved.get_solution().columns().to_vec();
        Ok(IlpSolution {
            status,
            objective: model.objective(&values),
            values,
        })
    }
}
