//! CPLEX LP text export and the plain-text solution file format used by
//! external solver processes.

use std::fmt::Write as _;

use super::backend::{IlpSolution, SolveStatus};
use super::model::{IlpModel, Sense, VarKind};
use crate::error::{Error, Result};

const TERMS_PER_LINE: usize = 8;

fn write_terms(out: &mut String, terms: &[(usize, f64)], model: &IlpModel) {
    if terms.is_empty() {
        // LP syntax needs at least one term on a row.
        let _ = write!(out, " 0 {}", model.variables[0].name);
        return;
    }
    for (k, &(i, a)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let name = &model.variables[i].name;
        if k == 0 {
            if a < 0.0 {
                let _ = write!(out, " - {} {}", -a, name);
            } else {
                let _ = write!(out, " {} {}", a, name);
            }
        } else if a < 0.0 {
            let _ = write!(out, " - {} {}", -a, name);
        } else {
            let _ = write!(out, " + {} {}", a, name);
        }
    }
}

/// Serializes the model. With `relax` set, binaries become continuous
/// variables bounded by `[0, 1]`.
pub fn export_lp(model: &IlpModel, relax: bool) -> String {
    let mut out = String::new();
    out.push_str("\\ graph inspection model\n");
    out.push_str("Minimize\n obj:");
    let obj: Vec<(usize, f64)> = model
        .variables
        .iter()
        .enumerate()
        .filter(|(_, v)| v.obj != 0.0)
        .map(|(i, v)| (i, v.obj))
        .collect();
    write_terms(&mut out, &obj, model);
    out.push_str("\nSubject To\n");
    for row in &model.constraints {
        let _ = write!(out, " {}:", row.name);
        write_terms(&mut out, &row.terms, model);
        let sense = match row.sense {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        };
        let _ = writeln!(out, " {} {}", sense, row.rhs);
    }
    out.push_str("Bounds\n");
    for v in &model.variables {
        let binary_relaxed = v.kind == VarKind::Binary && relax;
        if v.kind == VarKind::Binary && !relax {
            continue;
        }
        let upper = if binary_relaxed { Some(1.0) } else { v.upper };
        match upper {
            Some(u) => {
                let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, u);
            }
            None if v.lower != 0.0 => {
                let _ = writeln!(out, " {} >= {}", v.name, v.lower);
            }
            None => {}
        }
    }
    if !relax {
        let binaries: Vec<&str> = model
            .variables
            .iter()
            .filter(|v| v.kind == VarKind::Binary)
            .map(|v| v.name.as_str())
            .collect();
        if !binaries.is_empty() {
            out.push_str("Binaries\n");
            for chunk in binaries.chunks(TERMS_PER_LINE) {
                let _ = writeln!(out, " {}", chunk.join(" "));
            }
        }
    }
    out.push_str("End\n");
    out
}

fn status_word(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Feasible => "feasible",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Timeout => "timeout",
    }
}

/// Writes a solution file: status line, objective line, then one
/// `name value` line per nonzero variable.
pub fn write_solution(model: &IlpModel, sol: &IlpSolution) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "status {}", status_word(sol.status));
    let _ = writeln!(out, "objective {}", sol.objective);
    for (v, &x) in model.variables.iter().zip(&sol.values) {
        if x != 0.0 {
            let _ = writeln!(out, "{} {}", v.name, x);
        }
    }
    out
}

/// Parses a solution file against the model's variable names. Variables not
/// listed are zero. With status `infeasible` or `timeout` the value list may
/// be empty.
pub fn import_solution(model: &IlpModel, text: &str) -> Result<IlpSolution> {
    let index: std::collections::HashMap<&str, usize> = model
        .variables
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.as_str(), i))
        .collect();
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (no, line) = lines
        .next()
        .ok_or_else(|| Error::parse(1, 1, "empty solution file"))?;
    let status = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["status", "optimal"] => SolveStatus::Optimal,
        ["status", "feasible"] => SolveStatus::Feasible,
        ["status", "infeasible"] => SolveStatus::Infeasible,
        ["status", "timeout"] => SolveStatus::Timeout,
        _ => {
            return Err(Error::parse(
                no,
                1,
                format!("expected status line, got {line:?}"),
            ))
        }
    };

    let (no, line) = lines
        .next()
        .ok_or_else(|| Error::parse(no + 1, 1, "missing objective line"))?;
    let objective = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["objective", value] => parse_value(value, no, line)?,
        _ => {
            return Err(Error::parse(
                no,
                1,
                format!("expected objective line, got {line:?}"),
            ))
        }
    };

    let has_values = matches!(status, SolveStatus::Optimal | SolveStatus::Feasible);
    let mut values = vec![0.0; model.variables.len()];
    for (no, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [name, value] = parts.as_slice() else {
            return Err(Error::parse(
                no,
                1,
                format!("expected `name value`, got {line:?}"),
            ));
        };
        let &i = index
            .get(name)
            .ok_or_else(|| Error::parse(no, 1, format!("unknown variable {name}")))?;
        values[i] = parse_value(value, no, line)?;
    }
    Ok(IlpSolution {
        status,
        objective,
        values: if has_values { values } else { Vec::new() },
    })
}

fn parse_value(token: &str, line_no: usize, line: &str) -> Result<f64> {
    let column = line.find(token).map_or(1, |c| c + 1);
    token
        .parse::<f64>()
        .ok()
        .filter(|x| !x.is_nan())
        .ok_or_else(|| Error::parse(line_no, column, format!("invalid number {token:?}")))
}
