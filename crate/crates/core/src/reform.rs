//! Solver-agnostic LP/MILP models and the fairness reformulations that
//! emit them.
//!
//! Every builder lays variables out as `x_j`, then `u_i`, then (masters in
//! objective mode) `delta`, then per weight block `lam_k_i`, `the_k_i`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::{MeasureKind, WeightVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("constraint `{con}` references undeclared variable {var}")]
    UndeclaredVariable { con: String, var: usize },
    #[error("objective references undeclared variable {0}")]
    UndeclaredObjective(usize),
    #[error("variable `{0}` has lower bound above upper bound")]
    InvertedBounds(String),
    #[error("non-finite coefficient in `{0}`")]
    NonFinite(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReformError {
    #[error("builder requires {expected} mode")]
    ModeMismatch { expected: &'static str },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("master problem needs at least one cut")]
    EmptyCuts,
    #[error("measure `{0}` is not supported by this builder")]
    UnsupportedKind(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarGroup {
    X,
    U,
    Lambda,
    Theta,
    Delta,
    Z,
    Aux,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lb: f64,
    pub ub: f64,
    pub integer: bool,
    pub group: VarGroup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `min objᵀx + offset` over linear rows, bounds and integrality.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub vars: Vec<Variable>,
    pub cons: Vec<Constraint>,
    pub objective: Vec<f64>,
    pub offset: f64,
}

impl LinearModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lb: f64, ub: f64, integer: bool, group: VarGroup) -> usize {
        self.vars.push(Variable { name: name.into(), lb, ub, integer, group });
        self.objective.push(0.0);
        self.vars.len() - 1
    }

    pub fn add_con(&mut self, name: impl Into<String>, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> usize {
        self.cons.push(Constraint { name: name.into(), coeffs, sense, rhs });
        self.cons.len() - 1
    }

    pub fn add_obj(&mut self, var: usize, coef: f64) {
        self.objective[var] += coef;
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_cons(&self) -> usize {
        self.cons.len()
    }

    pub fn count(&self, group: VarGroup) -> usize {
        self.vars.iter().filter(|v| v.group == group).count()
    }

    pub fn num_integer(&self) -> usize {
        self.vars.iter().filter(|v| v.integer).count()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for v in &self.vars {
            if v.lb > v.ub || v.lb.is_nan() || v.ub.is_nan() || v.lb == f64::INFINITY || v.ub == f64::NEG_INFINITY {
                return Err(ModelError::InvertedBounds(v.name.clone()));
            }
        }
        if self.objective.len() > self.vars.len() {
            return Err(ModelError::UndeclaredObjective(self.vars.len()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) || !self.offset.is_finite() {
            return Err(ModelError::NonFinite("objective".into()));
        }
        for c in &self.cons {
            for &(j, a) in &c.coeffs {
                if j >= self.vars.len() {
                    return Err(ModelError::UndeclaredVariable { con: c.name.clone(), var: j });
                }
                if !a.is_finite() {
                    return Err(ModelError::NonFinite(c.name.clone()));
                }
            }
            if !c.rhs.is_finite() {
                return Err(ModelError::NonFinite(c.name.clone()));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.offset + self.objective.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Largest bound, row or integrality violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (v, &xv) in self.vars.iter().zip(x) {
            worst = worst.max(v.lb - xv).max(xv - v.ub);
            if v.integer {
                worst = worst.max((xv - xv.round()).abs());
            }
        }
        for c in &self.cons {
            let lhs: f64 = c.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let viol = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    /// CPLEX LP text with 17 significant digits per coefficient.
    pub fn to_lp_format(&self) -> String {
        let num = |v: f64| format!("{:.16e}", v);
        let term = |out: &mut String, first: bool, a: f64, name: &str| {
            let sign = if a < 0.0 { " -" } else if first { "" } else { " +" };
            let _ = write!(out, "{sign} {} {name}", num(a.abs()));
        };
        let mut out = String::from("\\ fairopt model\nMinimize\n obj:");
        let mut first = true;
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                term(&mut out, first, c, &self.vars[j].name);
                first = false;
            }
        }
        if self.offset != 0.0 || first {
            let sign = if self.offset < 0.0 { " -" } else if first { "" } else { " +" };
            let _ = write!(out, "{sign} {}", num(self.offset.abs()));
        }
        out.push_str("\nSubject To\n");
        for c in &self.cons {
            let _ = write!(out, " {}:", c.name);
            let mut first = true;
            for &(j, a) in &c.coeffs {
                if a != 0.0 {
                    term(&mut out, first, a, &self.vars[j].name);
                    first = false;
                }
            }
            if first {
                let _ = write!(out, " 0 {}", self.vars.first().map_or("x", |v| v.name.as_str()));
            }
            let op = match c.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", num(c.rhs));
        }
        out.push_str("Bounds\n");
        for v in &self.vars {
            let bound = |b: f64| {
                if b == f64::INFINITY {
                    "+inf".to_string()
                } else if b == f64::NEG_INFINITY {
                    "-inf".to_string()
                } else {
                    num(b)
                }
            };
            if v.lb == f64::NEG_INFINITY && v.ub == f64::INFINITY {
                let _ = writeln!(out, " {} free", v.name);
            } else {
                let _ = writeln!(out, " {} <= {} <= {}", bound(v.lb), v.name, bound(v.ub));
            }
        }
        let ints: Vec<&str> = self.vars.iter().filter(|v| v.integer).map(|v| v.name.as_str()).collect();
        if !ints.is_empty() {
            out.push_str("Generals\n");
            for chunk in ints.chunks(8) {
                let _ = writeln!(out, " {}", chunk.join(" "));
            }
        }
        out.push_str("End\n");
        out
    }
}

/// A decision variable of the outer problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XVar {
    pub name: String,
    pub lb: f64,
    pub ub: f64,
    #[serde(default)]
    pub integer: bool,
}

/// A linear row over `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XRow {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Mode {
    Objective { gamma: f64 },
    Constraint { eta: f64 },
    RelativeConstraint { eta: f64 },
}

/// Outcome range used for the optional `λ`, `θ` bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRange {
    pub umin: f64,
    pub umax: f64,
}

/// `min cᵀx + dᵀu + γ·s·ν(u)` (or the constrained variants) subject to
/// `u = Ax + b` and linear rows on `x`. Here `s` is `fairness_scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub x: Vec<XVar>,
    pub rows: Vec<XRow>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub measure: MeasureKind,
    pub mode: Mode,
    #[serde(default = "one")]
    pub fairness_scale: f64,
    #[serde(default)]
    pub nonnegative_outcomes: bool,
    #[serde(default)]
    pub outcome_range: Option<OutcomeRange>,
}

fn one() -> f64 {
    1.0
}

impl ProblemInstance {
    pub fn n_subjects(&self) -> usize {
        self.b.len()
    }

    pub fn n_x(&self) -> usize {
        self.x.len()
    }

    pub fn validate(&self) -> Result<(), ReformError> {
        let bad = |m: &str| Err(ReformError::InvalidInstance(m.to_string()));
        let n = self.n_subjects();
        if n < 2 {
            return bad("need at least two subjects");
        }
        if self.a.len() != n || self.d.len() != n {
            return bad("outcome map and d must have one row per subject");
        }
        if self.a.iter().any(|r| r.len() != self.n_x()) || self.c.len() != self.n_x() {
            return bad("outcome map and c must have one column per x variable");
        }
        if self.x.iter().any(|v| v.lb > v.ub) {
            return bad("x bounds inverted");
        }
        if self.rows.iter().any(|r| r.coeffs.iter().any(|&(j, _)| j >= self.n_x())) {
            return bad("row references unknown x variable");
        }
        if !(self.fairness_scale > 0.0 && self.fairness_scale.is_finite()) {
            return bad("fairness scale must be positive");
        }
        match self.mode {
            Mode::Objective { gamma } if !(gamma >= 0.0) => return bad("gamma must be nonnegative"),
            Mode::Constraint { eta } if !(eta >= 0.0) => return bad("eta must be nonnegative"),
            Mode::RelativeConstraint { eta } if !(0.0..=1.0).contains(&eta) => {
                return bad("relative eta must lie in [0, 1]")
            }
            Mode::RelativeConstraint { .. } if !self.nonnegative_outcomes => {
                return bad("relative mode needs nonnegative outcomes")
            }
            _ => {}
        }
        if let Some(n) = self.measure.fixed_dim() {
            if n != self.n_subjects() {
                return Err(ReformError::DimensionMismatch { expected: self.n_subjects(), got: n });
            }
        }
        Ok(())
    }

    pub fn outcomes(&self, x: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, b)| b + row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>())
            .collect()
    }

    pub fn efficiency(&self, x: &[f64], u: &[f64]) -> f64 {
        self.c.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
            + self.d.iter().zip(u).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Weight on `ν` in objective mode, `γ·s`.
    pub fn fairness_weight(&self) -> f64 {
        match self.mode {
            Mode::Objective { gamma } => gamma * self.fairness_scale,
            _ => 0.0,
        }
    }

    /// Interval bounds of `Ax + b` over the `x` box, when finite.
    pub fn box_outcome_range(&self) -> Option<OutcomeRange> {
        let mut umin = f64::INFINITY;
        let mut umax = f64::NEG_INFINITY;
        for (row, b) in self.a.iter().zip(&self.b) {
            let (mut lo, mut hi) = (*b, *b);
            for (a, v) in row.iter().zip(&self.x) {
                if *a == 0.0 {
                    continue;
                }
                let (p, q) = (a * v.lb, a * v.ub);
                lo += p.min(q);
                hi += p.max(q);
            }
            umin = umin.min(lo);
            umax = umax.max(hi);
        }
        (umin.is_finite() && umax.is_finite()).then_some(OutcomeRange { umin, umax })
    }
}

/// Index layout of a model built from a [`ProblemInstance`].
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub x: Vec<usize>,
    pub u: Vec<usize>,
    pub delta: Option<usize>,
}

impl Layout {
    pub fn extract_x(&self, sol: &[f64]) -> Vec<f64> {
        self.x.iter().map(|&j| sol[j]).collect()
    }

    pub fn extract_u(&self, sol: &[f64]) -> Vec<f64> {
        self.u.iter().map(|&j| sol[j]).collect()
    }
}

/// `x`, `u`, the outcome map and the efficiency objective.
pub fn base_model(p: &ProblemInstance) -> Result<(LinearModel, Layout), ReformError> {
    p.validate()?;
    let mut m = LinearModel::new();
    let x: Vec<usize> = p
        .x
        .iter()
        .map(|v| m.add_var(v.name.clone(), v.lb, v.ub, v.integer, VarGroup::X))
        .collect();
    let (ulb, uub) = if p.nonnegative_outcomes { (0.0, f64::INFINITY) } else { (f64::NEG_INFINITY, f64::INFINITY) };
    let u: Vec<usize> = (0..p.n_subjects()).map(|i| m.add_var(format!("u_{i}"), ulb, uub, false, VarGroup::U)).collect();
    for (i, row) in p.a.iter().enumerate() {
        let mut coeffs = vec![(u[i], 1.0)];
        coeffs.extend(row.iter().enumerate().filter(|(_, a)| **a != 0.0).map(|(j, a)| (x[j], -a)));
        m.add_con(format!("outcome_{i}"), coeffs, Sense::Eq, p.b[i]);
    }
    for (r, row) in p.rows.iter().enumerate() {
        let coeffs = row.coeffs.iter().map(|&(j, a)| (x[j], a)).collect();
        m.add_con(format!("xrow_{r}"), coeffs, row.sense, row.rhs);
    }
    for (j, c) in p.c.iter().enumerate() {
        m.add_obj(x[j], *c);
    }
    for (i, d) in p.d.iter().enumerate() {
        m.add_obj(u[i], *d);
    }
    Ok((m, Layout { x, u, delta: None }))
}

/// Bounds on `λ` and `θ` that cut no optimal solution, given an outcome
/// range. Returns `(λ̄, θ_lo, θ_hi)`.
pub fn dual_variable_bounds(w: &[f64], range: OutcomeRange) -> (f64, Vec<f64>, Vec<f64>) {
    let winf = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lam = (range.umax - range.umin) * winf;
    let lo = w.iter().map(|&wi| (range.umax * wi).min(range.umin * wi) - lam).collect();
    let hi = w.iter().map(|&wi| (range.umax * wi).max(range.umin * wi)).collect();
    (lam, lo, hi)
}

/// Adds `λ^k`, `θ^k` and the rows `λ_i + θ_j ≥ u_i w_j`; returns the
/// indices of all `λ^k` and `θ^k` variables.
fn add_weight_block(
    m: &mut LinearModel,
    u: &[usize],
    w: &[f64],
    k: usize,
    range: Option<OutcomeRange>,
) -> Vec<usize> {
    let n = u.len();
    let (lam_b, th_lo, th_hi) = match range {
        Some(r) => {
            let (l, lo, hi) = dual_variable_bounds(w, r);
            (Some(l), lo, hi)
        }
        None => (None, vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n]),
    };
    let lam: Vec<usize> = (0..n)
        .map(|i| match lam_b {
            Some(l) => m.add_var(format!("lam_{k}_{i}"), 0.0, l, false, VarGroup::Lambda),
            None => m.add_var(format!("lam_{k}_{i}"), f64::NEG_INFINITY, f64::INFINITY, false, VarGroup::Lambda),
        })
        .collect();
    let the: Vec<usize> = (0..n)
        .map(|j| m.add_var(format!("the_{k}_{j}"), th_lo[j], th_hi[j], false, VarGroup::Theta))
        .collect();
    for i in 0..n {
        for j in 0..n {
            let mut coeffs = vec![(lam[i], 1.0), (the[j], 1.0)];
            if w[j] != 0.0 {
                coeffs.push((u[i], -w[j]));
            }
            m.add_con(format!("dual_{k}_{i}_{j}"), coeffs, Sense::Ge, 0.0);
        }
    }
    lam.into_iter().chain(the).collect()
}

fn check_weight(p: &ProblemInstance, w: &WeightVector) -> Result<(), ReformError> {
    if w.len() != p.n_subjects() {
        return Err(ReformError::DimensionMismatch { expected: p.n_subjects(), got: w.len() });
    }
    Ok(())
}

/// Single-weight model in objective mode: `min cᵀx + dᵀu + γ·s·1ᵀ(λ+θ)`.
pub fn reformulate_order_based_objective(
    p: &ProblemInstance,
    w: &WeightVector,
) -> Result<(LinearModel, Layout), ReformError> {
    let Mode::Objective { .. } = p.mode else {
        return Err(ReformError::ModeMismatch { expected: "objective" });
    };
    check_weight(p, w)?;
    let (mut m, layout) = base_model(p)?;
    let weight = p.fairness_weight();
    for v in add_weight_block(&mut m, &layout.u, w.as_slice(), 0, p.outcome_range) {
        m.add_obj(v, weight);
    }
    Ok((m, layout))
}

/// Single-weight model with the budget row `s·1ᵀ(λ+θ) ≤ η`.
pub fn reformulate_order_based_constraint(
    p: &ProblemInstance,
    w: &WeightVector,
) -> Result<(LinearModel, Layout), ReformError> {
    let Mode::Constraint { eta } = p.mode else {
        return Err(ReformError::ModeMismatch { expected: "constraint" });
    };
    check_weight(p, w)?;
    let (mut m, layout) = base_model(p)?;
    let block = add_weight_block(&mut m, &layout.u, w.as_slice(), 0, p.outcome_range);
    let s = p.fairness_scale;
    m.add_con("budget_0", block.into_iter().map(|v| (v, s)).collect(), Sense::Le, eta);
    Ok((m, layout))
}

/// Single-weight model with `1ᵀ(λ+θ) ≤ η·w_max·1ᵀu`.
pub fn reformulate_relative_constraint(
    p: &ProblemInstance,
    w: &WeightVector,
    wmax: f64,
) -> Result<(LinearModel, Layout), ReformError> {
    let Mode::RelativeConstraint { eta } = p.mode else {
        return Err(ReformError::ModeMismatch { expected: "relative constraint" });
    };
    check_weight(p, w)?;
    let (mut m, layout) = base_model(p)?;
    let block = add_weight_block(&mut m, &layout.u, w.as_slice(), 0, p.outcome_range);
    let mut coeffs: Vec<(usize, f64)> = block.into_iter().map(|v| (v, 1.0)).collect();
    coeffs.extend(layout.u.iter().map(|&ui| (ui, -eta * wmax)));
    m.add_con("budget_0", coeffs, Sense::Le, 0.0);
    Ok((m, layout))
}

/// Merges cuts equal within `1e-9`, keeping first occurrences.
pub fn dedup_cuts(cuts: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for c in cuts {
        if !out.iter().any(|o| o.iter().zip(c).all(|(a, b)| (a - b).abs() <= 1e-9)) {
            out.push(c.clone());
        }
    }
    out
}

/// Relaxed problem over a finite cut set.
///
/// Objective mode minimizes `cᵀx + dᵀu + γ·s·δ` with `δ ≥ 1ᵀ(λᵏ+θᵏ)`;
/// constraint modes add one budget row per cut. A zero cut contributes
/// only `δ ≥ 0`, which holds for every fairness measure.
pub fn build_ccg_master(
    p: &ProblemInstance,
    cuts: &[Vec<f64>],
    wmax: f64,
) -> Result<(LinearModel, Layout), ReformError> {
    if cuts.is_empty() {
        return Err(ReformError::EmptyCuts);
    }
    let n = p.n_subjects();
    if let Some(c) = cuts.iter().find(|c| c.len() != n) {
        return Err(ReformError::DimensionMismatch { expected: n, got: c.len() });
    }
    let (mut m, mut layout) = base_model(p)?;
    if let Mode::Objective { .. } = p.mode {
        let delta = m.add_var("delta", 0.0, f64::INFINITY, false, VarGroup::Delta);
        m.add_obj(delta, p.fairness_weight());
        layout.delta = Some(delta);
    }
    for (k, w) in dedup_cuts(cuts).iter().enumerate() {
        add_cut(&mut m, &layout, p, w, k, wmax);
    }
    Ok((m, layout))
}

/// Appends the variables and rows of one cut. Zero cuts add nothing.
pub(crate) fn add_cut(m: &mut LinearModel, layout: &Layout, p: &ProblemInstance, w: &[f64], k: usize, wmax: f64) {
    if w.iter().all(|v| v.abs() <= 1e-12) {
        return;
    }
    let block = add_weight_block(m, &layout.u, w, k, p.outcome_range);
    match p.mode {
        Mode::Objective { .. } => {
            let delta = layout.delta.expect("objective master has delta");
            let mut coeffs = vec![(delta, 1.0)];
            coeffs.extend(block.into_iter().map(|v| (v, -1.0)));
            m.add_con(format!("epi_{k}"), coeffs, Sense::Ge, 0.0);
        }
        Mode::Constraint { eta } => {
            let s = p.fairness_scale;
            m.add_con(format!("budget_{k}"), block.into_iter().map(|v| (v, s)).collect(), Sense::Le, eta);
        }
        Mode::RelativeConstraint { eta } => {
            let mut coeffs: Vec<(usize, f64)> = block.into_iter().map(|v| (v, 1.0)).collect();
            coeffs.extend(layout.u.iter().map(|&ui| (ui, -eta * wmax)));
            m.add_con(format!("budget_{k}"), coeffs, Sense::Le, 0.0);
        }
    }
}

/// Baseline MAD model with `z_i ≥ |u_i − ū|`.
pub fn traditional_mad_model(p: &ProblemInstance) -> Result<(LinearModel, Layout), ReformError> {
    if p.measure != MeasureKind::Mad {
        return Err(ReformError::UnsupportedKind(p.measure.to_string()));
    }
    let Mode::Objective { .. } = p.mode else {
        return Err(ReformError::ModeMismatch { expected: "objective" });
    };
    let (mut m, layout) = base_model(p)?;
    let n = p.n_subjects();
    let inv = 1.0 / n as f64;
    let weight = p.fairness_weight();
    for i in 0..n {
        let z = m.add_var(format!("z_{i}"), 0.0, f64::INFINITY, false, VarGroup::Z);
        m.add_obj(z, weight);
        for sgn in [1.0, -1.0] {
            let mut coeffs = vec![(z, 1.0)];
            for k in 0..n {
                let a = if k == i { 1.0 - inv } else { -inv };
                coeffs.push((layout.u[k], -sgn * a));
            }
            let tag = if sgn > 0.0 { "p" } else { "n" };
            m.add_con(format!("mad_{tag}_{i}"), coeffs, Sense::Ge, 0.0);
        }
    }
    Ok((m, layout))
}

/// Baseline Gini model with `z_{i,i'} ≥ |u_i − u_{i'}|` over all ordered pairs.
pub fn traditional_gini_model(p: &ProblemInstance) -> Result<(LinearModel, Layout), ReformError> {
    if p.measure != MeasureKind::GiniDeviation {
        return Err(ReformError::UnsupportedKind(p.measure.to_string()));
    }
    let Mode::Objective { .. } = p.mode else {
        return Err(ReformError::ModeMismatch { expected: "objective" });
    };
    let (mut m, layout) = base_model(p)?;
    let n = p.n_subjects();
    let weight = p.fairness_weight();
    for i in 0..n {
        for k in 0..n {
            let z = m.add_var(format!("z_{i}_{k}"), 0.0, f64::INFINITY, false, VarGroup::Z);
            m.add_obj(z, weight);
            if i == k {
                continue;
            }
            for sgn in [1.0, -1.0] {
                let coeffs = vec![(z, 1.0), (layout.u[i], -sgn), (layout.u[k], sgn)];
                let tag = if sgn > 0.0 { "p" } else { "n" };
                m.add_con(format!("gini_{tag}_{i}_{k}"), coeffs, Sense::Ge, 0.0);
            }
        }
    }
    Ok((m, layout))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn free_square(n: usize, gamma: f64) -> ProblemInstance {
        ProblemInstance {
            a: (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect(),
            b: vec![0.0; n],
            x: (0..n).map(|j| XVar { name: format!("x_{j}"), lb: 0.0, ub: 1.0, integer: false }).collect(),
            rows: vec![],
            c: vec![0.0; n],
            d: vec![0.0; n],
            measure: MeasureKind::GiniDeviation,
            mode: Mode::Objective { gamma },
            fairness_scale: 1.0,
            nonnegative_outcomes: false,
            outcome_range: None,
        }
    }

    #[test]
    fn prop_bounds_example() {
        let (lam, lo, hi) = dual_variable_bounds(&[-1.0, 0.0, 1.0], OutcomeRange { umin: 0.0, umax: 10.0 });
        assert_eq!(lam, 10.0);
        assert_eq!((lo[0], hi[0]), (-20.0, 0.0));
        assert_eq!((lo[2], hi[2]), (-10.0, 10.0));
    }

    #[test]
    fn objective_model_shape() {
        let p = free_square(4, 1.0);
        let (m, layout) = reformulate_order_based_objective(&p, &WeightVector::gini(4)).unwrap();
        m.validate().unwrap();
        assert_eq!(m.count(VarGroup::Lambda) + m.count(VarGroup::Theta), 8);
        assert_eq!(m.num_cons(), 4 + 16);
        assert_eq!(layout.u, vec![4, 5, 6, 7]);
        let mut p2 = p.clone();
        p2.mode = Mode::Constraint { eta: 1.0 };
        assert!(matches!(
            reformulate_order_based_objective(&p2, &WeightVector::gini(4)),
            Err(ReformError::ModeMismatch { .. })
        ));
        assert!(matches!(
            reformulate_order_based_objective(&p, &WeightVector::gini(3)),
            Err(ReformError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gini_baseline_sizes() {
        let p = free_square(5, 1.0);
        let (base, _) = traditional_gini_model(&p).unwrap();
        let (ours, _) = reformulate_order_based_objective(&p, &WeightVector::gini(5)).unwrap();
        assert_eq!(base.count(VarGroup::Z), 25);
        assert_eq!(ours.count(VarGroup::Lambda) + ours.count(VarGroup::Theta), 10);
        let mut q = p.clone();
        q.measure = MeasureKind::Mad;
        assert!(matches!(traditional_gini_model(&q), Err(ReformError::UnsupportedKind(_))));
        assert_eq!(traditional_mad_model(&q).unwrap().0.count(VarGroup::Z), 5);
    }

    #[test]
    fn master_cuts() {
        let p = free_square(3, 1.0);
        assert_eq!(build_ccg_master(&p, &[], 1.0).unwrap_err(), ReformError::EmptyCuts);
        let (m, layout) = build_ccg_master(&p, &[vec![0.0; 3]], 1.0).unwrap();
        assert_eq!(layout.delta, Some(6));
        assert_eq!(m.num_vars(), 7);
        let w = vec![-1.0, 0.0, 1.0];
        let (m, _) = build_ccg_master(&p, &[vec![0.0; 3], w.clone(), w.clone()], 1.0).unwrap();
        assert_eq!(m.count(VarGroup::Lambda), 3);
        m.validate().unwrap();
    }

    #[test]
    fn validator_catches_bad_models() {
        let mut m = LinearModel::new();
        let x = m.add_var("x", 0.0, 1.0, false, VarGroup::X);
        m.add_con("c", vec![(x, 1.0), (3, 1.0)], Sense::Le, 1.0);
        assert!(matches!(m.validate(), Err(ModelError::UndeclaredVariable { var: 3, .. })));
        let mut m = LinearModel::new();
        m.add_var("x", 2.0, 1.0, false, VarGroup::X);
        assert!(matches!(m.validate(), Err(ModelError::InvertedBounds(_))));
        let mut m = LinearModel::new();
        let x = m.add_var("x", 0.0, 1.0, false, VarGroup::X);
        m.add_con("c", vec![(x, f64::NAN)], Sense::Le, 1.0);
        assert!(matches!(m.validate(), Err(ModelError::NonFinite(_))));
    }

    #[test]
    fn lp_format_roundtrip_digits() {
        let mut m = LinearModel::new();
        let x = m.add_var("x", 0.0, f64::INFINITY, true, VarGroup::X);
        let y = m.add_var("y", f64::NEG_INFINITY, f64::INFINITY, false, VarGroup::Aux);
        m.add_obj(x, 0.1);
        m.add_obj(y, -1.0 / 3.0);
        m.add_con("r0", vec![(x, 1.0), (y, -2.0)], Sense::Ge, 3.0);
        let text = m.to_lp_format();
        assert!(text.starts_with("\\ fairopt model\nMinimize\n obj: 1.0000000000000001e-1 x - 3.3333333333333331e-1 y"));
        assert!(text.contains(" r0: 1.0000000000000000e0 x - 2.0000000000000000e0 y >= 3.0000000000000000e0\n"));
        assert!(text.contains(" y free\n"));
        assert!(text.contains("Generals\n x\n"));
        assert!(text.ends_with("End\n"));
        let parsed: f64 = "3.3333333333333331e-1".parse().unwrap();
        assert_eq!(parsed, 1.0 / 3.0);
    }

    #[test]
    fn instance_json_roundtrip() {
        let p = free_square(3, 0.5);
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains(r#""mode":{"mode":"objective","gamma":0.5}"#));
        let q: ProblemInstance = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }
}
