//! Integer programming formulation: model construction, solver backends,
//! walk recovery and LP-relaxation lower bounds.

mod backend;
mod external;
mod highs_backend;
mod lp_format;
mod model;
mod reference;

pub use backend::{solve, Capabilities, IlpSolution, SolveParams, SolveStatus, SolverBackend};
pub use external::{solve_lp_file, ExternalBackend, BACKEND_PATH_ENV};
pub use highs_backend::HighsBackend;
pub use lp_format::{export_lp, import_solution, write_solution};
pub use model::{build_model, Constraint, IlpModel, Sense, VarKind, Variable, FEAS_TOL};
pub use reference::{assignment_from_walk, minimal_walk, ReferenceBackend};

use std::time::Duration;

use crate::error::{Error, Result};
use crate::graph::{InspectionInstance, Walk, WalkMultigraph};

/// Turns a solution into a closed walk: every directed edge with `x = 1`
/// contributes one copy of its undirected edge, and the resulting Eulerian
/// multigraph is toured from the start.
pub fn recover_walk(
    inst: &InspectionInstance,
    model: &IlpModel,
    sol: &IlpSolution,
) -> Result<Walk> {
    match sol.status {
        SolveStatus::Optimal | SolveStatus::Feasible => {}
        SolveStatus::Infeasible => return Err(Error::Infeasible),
        SolveStatus::Timeout => return Err(Error::Timeout),
    }
    if sol.values.len() != model.variables.len() {
        return Err(Error::ModelRejected(format!(
            "{} values for {} variables",
            sol.values.len(),
            model.variables.len()
        )));
    }
    let s = model.start();
    let mut g = WalkMultigraph::new();
    for ((u, v), i) in model.x_vars() {
        if sol.values[i].round() >= 1.0 {
            let w = inst
                .edge_weight(u, v)
                .ok_or_else(|| Error::ModelRejected(format!("no edge {u}-{v} in the instance")))?;
            g.add(u, v, w, 1)?;
        }
    }
    if g.is_empty() {
        if model.quota() == 0 {
            return Ok(Walk::trivial(inst, s));
        }
        return Err(Error::InvalidWalk("no edge selected".into()));
    }
    if !g.support().contains(&s) || !g.is_support_connected() {
        return Err(Error::CirculationDetected);
    }
    g.to_walk(inst, s)
}

/// Solves the instance through the integer program. A zero quota is
/// answered by the empty walk without a solver call.
pub fn solve_ilp(
    inst: &InspectionInstance,
    backend: &dyn SolverBackend,
    time_limit: Option<Duration>,
) -> Result<(Walk, IlpSolution)> {
    inst.require_normalized()?;
    if inst.quota() == 0 {
        let walk = Walk::trivial(inst, inst.start());
        let sol = IlpSolution {
            status: SolveStatus::Optimal,
            objective: 0.0,
            values: Vec::new(),
        };
        return Ok((walk, sol));
    }
    let model = build_model(inst)?;
    let sol = solve(&model, backend, time_limit)?;
    let walk = recover_walk(inst, &model, &sol)?;
    Ok((walk, sol))
}

/// Objective of the LP relaxation, a lower bound on the optimal walk weight.
pub fn lp_lower_bound(inst: &InspectionInstance, backend: &dyn SolverBackend) -> Result<f64> {
    lp_lower_bound_with(inst, backend, None)
}

pub fn lp_lower_bound_with(
    inst: &InspectionInstance,
    backend: &dyn SolverBackend,
    time_limit: Option<Duration>,
) -> Result<f64> {
    inst.require_normalized()?;
    if !backend.capabilities().lp_relaxation {
        return Err(Error::BackendUnavailable(format!(
            "{} has no LP relaxation",
            backend.name()
        )));
    }
    if inst.quota() == 0 {
        return Ok(0.0);
    }
    let model = build_model(inst)?;
    let params = SolveParams {
        relax: true,
        time_limit,
        ..SolveParams::default()
    };
    let sol = backend.solve(&model, &params)?;
    match sol.status {
        SolveStatus::Optimal => Ok(sol.objective.max(0.0)),
        SolveStatus::Infeasible => Err(Error::Infeasible),
        _ => Err(Error::Timeout),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    fn star(t: usize) -> InspectionInstance {
        let mut colors = vec![vec![]];
        for i in 1..=t {
            colors.push(vec![(i - 1) as u32]);
        }
        colors.push((0..t as u32).collect());
        InspectionInstance::new(
            t + 2,
            (1..=t + 1).map(|v| Edge::new(0, v, 1.0)),
            colors,
            t,
            0,
            t,
            None,
        )
        .unwrap()
    }

    #[test]
    fn star_model_optimum_and_recovery() {
        let inst = star(3);
        for backend in [&ReferenceBackend as &dyn SolverBackend, &HighsBackend] {
            let (walk, sol) = solve_ilp(&inst, backend, None).unwrap();
            assert_eq!(sol.status, SolveStatus::Optimal);
            assert!((sol.objective - 2.0).abs() < 1e-6);
            assert_eq!(walk.vertices, vec![0, 4, 0]);
        }
    }

    #[test]
    fn weighted_cycle_prefers_cheaper_shape() {
        // Square 0-1-2-3 with one light side: doubling 0-1 beats the cycle.
        let inst = InspectionInstance::new(
            4,
            [
                Edge::new(0, 1, 1.0),
                Edge::new(1, 2, 5.0),
                Edge::new(2, 3, 5.0),
                Edge::new(3, 0, 5.0),
            ],
            vec![vec![], vec![0], vec![], vec![]],
            1,
            0,
            1,
            None,
        )
        .unwrap();
        let model = build_model(&inst).unwrap();
        let sol = solve(&model, &HighsBackend, None).unwrap();
        let walk = recover_walk(&inst, &model, &sol).unwrap();
        assert_eq!(walk.weight, 2.0);
        assert!((walk.weight - sol.objective).abs() < 1e-6);
        // Color at 2 instead: out and back via 1 costs 12, the full cycle 16.
        let far = InspectionInstance::new(
            4,
            inst.edges().to_vec(),
            vec![vec![], vec![], vec![0], vec![]],
            1,
            0,
            1,
            None,
        )
        .unwrap();
        let model = build_model(&far).unwrap();
        let sol = solve(&model, &HighsBackend, None).unwrap();
        let walk = recover_walk(&far, &model, &sol).unwrap();
        assert_eq!(walk.weight, 12.0);
        assert!((walk.weight - sol.objective).abs() < 1e-6);
    }

    #[test]
    fn zero_quota_shortcuts() {
        let inst = star(2).with_quota(0).unwrap();
        let (walk, _) = solve_ilp(&inst, &ReferenceBackend, None).unwrap();
        assert_eq!(walk.vertices, vec![0]);
        assert_eq!(lp_lower_bound(&inst, &HighsBackend).unwrap(), 0.0);
        let model = build_model(&inst).unwrap();
        let empty = IlpSolution {
            status: SolveStatus::Optimal,
            objective: 0.0,
            values: vec![0.0; model.variables.len()],
        };
        assert_eq!(
            recover_walk(&inst, &model, &empty).unwrap().vertices,
            vec![0]
        );
    }

    #[test]
    fn lp_bound_below_star_optimum() {
        let inst = star(4);
        let lb = lp_lower_bound(&inst, &HighsBackend).unwrap();
        assert!(lb <= 2.0 + 1e-9);
        assert!(lb >= 0.0);
        assert!(matches!(
            lp_lower_bound(&inst, &ReferenceBackend),
            Err(Error::BackendUnavailable(_))
        ));
    }

    #[test]
    fn circulation_away_from_start_is_detected() {
        // Triangle 2-3-4 hanging off the start through the path 0-1-2.
        let inst = InspectionInstance::new(
            5,
            [
                Edge::new(0, 1, 1.0),
                Edge::new(1, 2, 1.0),
                Edge::new(2, 3, 1.0),
                Edge::new(3, 4, 1.0),
                Edge::new(2, 4, 1.0),
            ],
            vec![vec![], vec![0], vec![], vec![], vec![]],
            1,
            0,
            1,
            None,
        )
        .unwrap();
        let model = build_model(&inst).unwrap();
        let mut values = vec![0.0; model.variables.len()];
        for (u, v) in [(0, 1), (1, 0), (2, 3), (3, 4), (4, 2)] {
            values[model.x(u, v).unwrap()] = 1.0;
        }
        let sol = IlpSolution {
            status: SolveStatus::Optimal,
            objective: model.objective(&values),
            values: values.clone(),
        };
        assert!(matches!(
            recover_walk(&inst, &model, &sol),
            Err(Error::CirculationDetected)
        ));
        // The same assignment cannot satisfy the charge rows.
        assert!(model.check(&values, FEAS_TOL).is_err());
    }

    #[test]
    fn timeout_and_infeasible_statuses() {
        let inst = star(2);
        let model = build_model(&inst).unwrap();
        let sol = solve(&model, &HighsBackend, Some(Duration::ZERO)).unwrap();
        assert_eq!(sol.status, SolveStatus::Timeout);
        assert!(matches!(
            recover_walk(&inst, &model, &sol),
            Err(Error::Timeout)
        ));
        let inf = IlpSolution::without_assignment(SolveStatus::Infeasible);
        assert!(matches!(
            recover_walk(&inst, &model, &inf),
            Err(Error::Infeasible)
        ));
    }
}
