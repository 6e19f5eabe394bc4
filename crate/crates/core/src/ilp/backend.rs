use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::model::IlpModel;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveStatus {
    Optimal,
    /// Stopped at the time limit holding an incumbent.
    Feasible,
    Infeasible,
    /// Stopped at the time limit without any feasible assignment.
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IlpSolution {
    pub status: SolveStatus,
    pub objective: f64,
    /// One value per model variable; empty unless a solution exists.
    pub values: Vec<f64>,
}

impl IlpSolution {
    pub fn has_assignment(&self) -> bool {
        matches!(self.status, SolveStatus::Optimal | SolveStatus::Feasible)
    }

    pub(crate) fn without_assignment(status: SolveStatus) -> Self {
        IlpSolution {
            status,
            objective: f64::NAN,
            values: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Capabilities {
    pub milp: bool,
    pub lp_relaxation: bool,
    pub time_limit: bool,
    /// Whether a thread count is forwarded to the solver.
    pub threads: bool,
}

#[derive(Clone, Debug)]
pub struct SolveParams {
    pub time_limit: Option<Duration>,
    /// Solve the LP relaxation instead of the MILP.
    pub relax: bool,
    pub threads: Option<usize>,
    pub mip_rel_gap: f64,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            time_limit: None,
            relax: false,
            threads: None,
            mip_rel_gap: 1e-6,
        }
    }
}

pub trait SolverBackend: Send + Sync {
    fn name(&self) -> &str;
    fn capabilities(&self) -> Capabilities;
    fn solve(&self, model: &IlpModel, params: &SolveParams) -> Result<IlpSolution>;
}

/// Solves the MILP with a time limit, checking the backend's capabilities.
pub fn solve(
    model: &IlpModel,
    backend: &dyn SolverBackend,
    time_limit: Option<Duration>,
) -> Result<IlpSolution> {
    if !backend.capabilities().milp {
        return Err(Error::BackendUnavailable(format!(
            "{} cannot solve integer programs",
            backend.name()
        )));
    }
    let params = SolveParams {
        time_limit,
        ..SolveParams::default()
    };
    backend.solve(model, &params)
}
