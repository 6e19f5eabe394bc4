use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Color, InspectionInstance, VertexId};

/// Feasibility and integrality tolerance for assignments.
pub const FEAS_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub obj: f64,
    pub lower: f64,
    /// `None` means unbounded above.
    pub upper: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Minimization MILP together with name tables mapping its variables back
/// to directed edges (`x`), edge charges (`y`) and colors (`z`).
#[derive(Clone, Debug)]
pub struct IlpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    x: BTreeMap<(VertexId, VertexId), usize>,
    y: BTreeMap<(VertexId, VertexId, VertexId), usize>,
    z: BTreeMap<Color, usize>,
    start: VertexId,
    quota: usize,
    charge_coefficient: f64,
    source: Option<InspectionInstance>,
    extra_rows: bool,
}

impl IlpModel {
    fn add_var(&mut self, name: String, kind: VarKind, obj: f64, upper: Option<f64>) -> usize {
        self.variables.push(Variable {
            name,
            kind,
            obj,
            lower: 0.0,
            upper,
        });
        self.variables.len() - 1
    }

    fn add_row(&mut self, name: String, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint {
            name,
            terms,
            sense,
            rhs,
        });
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn quota(&self) -> usize {
        self.quota
    }

    /// Right-hand factor of the charge consumption rows, `2 - 2/(2n-3)`.
    pub fn charge_coefficient(&self) -> f64 {
        self.charge_coefficient
    }

    /// Index of `x_{u,v}` (directed edge `u -> v`).
    pub fn x(&self, u: VertexId, v: VertexId) -> Option<usize> {
        self.x.get(&(u, v)).copied()
    }

    /// Index of `y_{uv,w}` for the edge `uv` and its endpoint `w`.
    pub fn y(&self, u: VertexId, v: VertexId, w: VertexId) -> Option<usize> {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.y.get(&(a, b, w)).copied()
    }

    pub fn z(&self, c: Color) -> Option<usize> {
        self.z.get(&c).copied()
    }

    pub fn x_vars(&self) -> impl Iterator<Item = ((VertexId, VertexId), usize)> + '_ {
        self.x.iter().map(|(&k, &i)| (k, i))
    }

    pub fn y_count(&self) -> usize {
        self.y.len()
    }

    pub fn z_vars(&self) -> impl Iterator<Item = (Color, usize)> + '_ {
        self.z.iter().map(|(&c, &i)| (c, i))
    }

    /// Instance the model was built from, if it was built by [`build_model`].
    pub fn source(&self) -> Option<&InspectionInstance> {
        self.source.as_ref()
    }

    /// Whether rows beyond the inspection formulation were added.
    pub fn has_extra_rows(&self) -> bool {
        self.extra_rows
    }

    /// Adds `x_{u,v} + x_{v,u} <= 1`, forbidding the edge from being used
    /// in both directions.
    pub fn add_capacity_one(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        let (a, b) = (
            self.x(u, v)
                .ok_or_else(|| Error::ModelRejected(format!("no edge {u}-{v}")))?,
            self.x(v, u)
                .ok_or_else(|| Error::ModelRejected(format!("no edge {v}-{u}")))?,
        );
        let (lo, hi) = (u.min(v), u.max(v));
        self.add_row(
            format!("cap_{lo}_{hi}"),
            vec![(a, 1.0), (b, 1.0)],
            Sense::Le,
            1.0,
        );
        self.extra_rows = true;
        Ok(())
    }

    /// Builds a bare model from explicit variables and rows.
    pub fn from_parts(variables: Vec<Variable>, constraints: Vec<Constraint>) -> Self {
        IlpModel {
            variables,
            constraints,
            x: BTreeMap::new(),
            y: BTreeMap::new(),
            z: BTreeMap::new(),
            start: 0,
            quota: 0,
            charge_coefficient: 0.0,
            source: None,
            extra_rows: true,
        }
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn objective(&self, values: &[f64]) -> f64 {
        self.variables
            .iter()
            .zip(values)
            .map(|(v, x)| v.obj * x)
            .sum()
    }

    /// Checks bounds, integrality and every row within `tol`; the error
    /// names the first violated item.
    pub fn check(&self, values: &[f64], tol: f64) -> std::result::Result<(), String> {
        if values.len() != self.variables.len() {
            return Err(format!(
                "{} values for {} variables",
                values.len(),
                self.variables.len()
            ));
        }
        for (var, &x) in self.variables.iter().zip(values) {
            if !x.is_finite() || x < var.lower - tol || var.upper.is_some_and(|u| x > u + tol) {
                return Err(format!("{} = {x} is out of bounds", var.name));
            }
            if var.kind == VarKind::Binary && (x - x.round()).abs() > tol {
                return Err(format!("{} = {x} is not integral", var.name));
            }
        }
        for row in &self.constraints {
            let lhs: f64 = row.terms.iter().map(|&(i, a)| a * values[i]).sum();
            let ok = match row.sense {
                Sense::Le => lhs <= row.rhs + tol,
                Sense::Ge => lhs >= row.rhs - tol,
                Sense::Eq => (lhs - row.rhs).abs() <= tol,
            };
            if !ok {
                return Err(format!(
                    "row {}: lhs {lhs} violates {:?} {}",
                    row.name, row.sense, row.rhs
                ));
            }
        }
        Ok(())
    }
}

/// Flow formulation of graph inspection on a normalized instance.
///
/// Binary `x_{u,v}` marks each directed edge used by the walk; flow is
/// conserved everywhere and leaves the start at least once. Every edge not
/// touching the start emits two charges per use, split between its endpoints
/// through `y`, and a vertex may absorb at most `2 - 2/(2n-3)` charges per
/// incoming unit of flow; a circulation avoiding the start would have to
/// absorb all of its own charges and so cannot exist. Colors are covered
/// directly when every color is required and through `z` indicators
/// otherwise. The color set is the set of colors carried by some vertex.
pub fn build_model(inst: &InspectionInstance) -> Result<IlpModel> {
    inst.require_normalized()?;
    let n = inst.vertex_count();
    let s = inst.start();
    let t = inst.quota();
    let colors = inst.collectible_colors();
    if t > 0 && colors.is_empty() {
        return Err(Error::DegenerateInstance);
    }
    if t > colors.len() {
        return Err(Error::InfeasibleQuota {
            quota: t,
            available: colors.len(),
        });
    }
    if inst.neighbors(s).is_empty() {
        return Err(Error::DegenerateInstance);
    }
    let coefficient = if n >= 2 {
        2.0 - 2.0 / (2.0 * n as f64 - 3.0)
    } else {
        0.0
    };
    let mut model = IlpModel {
        variables: Vec::new(),
        constraints: Vec::new(),
        x: BTreeMap::new(),
        y: BTreeMap::new(),
        z: BTreeMap::new(),
        start: s,
        quota: t,
        charge_coefficient: coefficient,
        source: Some(inst.clone()),
        extra_rows: false,
    };

    for e in inst.edges() {
        let a = model.add_var(
            format!("x_{}_{}", e.u, e.v),
            VarKind::Binary,
            e.weight,
            Some(1.0),
        );
        model.x.insert((e.u, e.v), a);
        let b = model.add_var(
            format!("x_{}_{}", e.v, e.u),
            VarKind::Binary,
            e.weight,
            Some(1.0),
        );
        model.x.insert((e.v, e.u), b);
    }
    for e in inst.edges() {
        if e.u == s || e.v == s {
            continue;
        }
        for w in [e.u, e.v] {
            let i = model.add_var(
                format!("y_{}_{}_{}", e.u, e.v, w),
                VarKind::Continuous,
                0.0,
                None,
            );
            model.y.insert((e.u, e.v, w), i);
        }
    }
    let use_z = t < colors.len();
    if use_z {
        for &c in &colors {
            let i = model.add_var(format!("z_{c}"), VarKind::Binary, 0.0, Some(1.0));
            model.z.insert(c, i);
        }
    }

    // Flow preservation.
    for v in 0..n {
        let mut terms = Vec::new();
        for &(u, _) in inst.neighbors(v) {
            terms.push((model.x[&(u, v)], 1.0));
            terms.push((model.x[&(v, u)], -1.0));
        }
        model.add_row(format!("flow_{v}"), terms, Sense::Eq, 0.0);
    }
    // Flow leaves the start.
    let terms = inst
        .neighbors(s)
        .iter()
        .map(|&(u, _)| (model.x[&(s, u)], 1.0))
        .collect();
    model.add_row("src".into(), terms, Sense::Ge, 1.0);
    // Edges away from the start emit two charges per use.
    for e in inst.edges() {
        if e.u == s || e.v == s {
            continue;
        }
        let terms = vec![
            (model.y[&(e.u, e.v, e.u)], 1.0),
            (model.y[&(e.u, e.v, e.v)], 1.0),
            (model.x[&(e.u, e.v)], -2.0),
            (model.x[&(e.v, e.u)], -2.0),
        ];
        model.add_row(format!("charge_{}_{}", e.u, e.v), terms, Sense::Eq, 0.0);
    }
    // Charge consumption per unit of incoming flow.
    for v in (0..n).filter(|&v| v != s) {
        let mut terms = Vec::new();
        for &(u, _) in inst.neighbors(v) {
            if u != s {
                terms.push((model.y(u, v, v).expect("charge variable"), 1.0));
            }
            terms.push((model.x[&(u, v)], -coefficient));
        }
        model.add_row(format!("consume_{v}"), terms, Sense::Le, 0.0);
    }
    // Color collection.
    let mut holders: BTreeMap<Color, Vec<VertexId>> = BTreeMap::new();
    for v in 0..n {
        for &c in inst.colors(v) {
            holders.entry(c).or_default().push(v);
        }
    }
    for &c in &colors {
        let mut terms = Vec::new();
        for &v in &holders[&c] {
            for &(u, _) in inst.neighbors(v) {
                terms.push((model.x[&(u, v)], 1.0));
            }
        }
        if use_z {
            terms.push((model.z[&c], -1.0));
            model.add_row(format!("reach_{c}"), terms, Sense::Ge, 0.0);
        } else {
            model.add_row(format!("cover_{c}"), terms, Sense::Ge, 1.0);
        }
    }
    if use_z {
        let terms = model.z.values().map(|&i| (i, 1.0)).collect();
        model.add_row("quota".into(), terms, Sense::Ge, t as f64);
    }
    Ok(model)
}
