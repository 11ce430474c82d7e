//! LP/MILP solving and the column-and-constraint generation loops.
//!
//! The bundled backend is a bounded dual simplex with best-first
//! branch-and-bound on integer variables.

mod ccg;
pub(crate) mod simplex;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reform::{LinearModel, ModelError, Sense};
use simplex::{Basis, LpData, LpStatus, Simplex};

pub use ccg::{
    ccg_constraint, ccg_constraint_with, ccg_objective, ccg_objective_with, iteration_cap, CcgError, CcgIteration,
    CcgReport, CcgStatus, FEAS_TOL,
};

/// Integrality tolerance for branching.
pub const INT_TOL: f64 = 1e-6;
/// Relative optimality gap for pruning.
pub const MIP_GAP: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("backend failure: {0}")]
    BackendFailure(String),
    #[error("numerical breakdown: basis is ill-conditioned")]
    NumericalBreakdown,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Limits {
    pub time: Option<Duration>,
    pub nodes: Option<usize>,
}

impl Limits {
    pub fn none() -> Limits {
        Limits::default()
    }

    pub fn with_time(secs: f64) -> Limits {
        Limits { time: Some(Duration::from_secs_f64(secs)), nodes: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal(Solution),
    Infeasible,
    Unbounded,
    IterLimit,
    Timeout,
}

impl SolveStatus {
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            SolveStatus::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SolveStatus::Optimal(_) => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::IterLimit => "iter_limit",
            SolveStatus::Timeout => "timeout",
        }
    }
}

/// Pluggable solver entry point.
pub trait Backend {
    fn solve(&mut self, model: &LinearModel, limits: &Limits) -> Result<SolveStatus, SolverError>;
}

/// Dual simplex plus branch-and-bound.
///
/// With `warm_start` on, the root basis of each solve seeds the next one,
/// provided the next model only appends columns and rows.
#[derive(Debug, Default)]
pub struct BundledBackend {
    pub warm_start: bool,
    saved: Option<(Basis, usize, usize)>,
}

impl BundledBackend {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn warm() -> Self {
        BundledBackend { warm_start: true, saved: None }
    }
}

impl Backend for BundledBackend {
    fn solve(&mut self, model: &LinearModel, limits: &Limits) -> Result<SolveStatus, SolverError> {
        model.validate()?;
        let data = to_lp_data(model);
        let (n, m) = (data.cost.len(), data.row_lb.len());
        let hint = match (&self.saved, self.warm_start) {
            (Some((b, on, om)), true) if n >= *on && m >= *om => Some(b.grown(*on, n, m)),
            _ => None,
        };
        let (status, root) = branch_and_bound(model, &data, limits, hint.as_ref())?;
        if self.warm_start {
            self.saved = root.map(|b| (b, n, m));
        }
        Ok(status)
    }
}

/// Solves `m` with the bundled backend.
pub fn solve(m: &LinearModel, limits: &Limits) -> Result<SolveStatus, SolverError> {
    BundledBackend::new().solve(m, limits)
}

fn to_lp_data(model: &LinearModel) -> LpData {
    let mut d = LpData {
        cost: model.objective.clone(),
        col_lb: model.vars.iter().map(|v| v.lb).collect(),
        col_ub: model.vars.iter().map(|v| v.ub).collect(),
        ..LpData::default()
    };
    for (v, lb) in model.vars.iter().zip(d.col_lb.iter_mut()) {
        if v.integer {
            *lb = lb.ceil();
        }
    }
    for (v, ub) in model.vars.iter().zip(d.col_ub.iter_mut()) {
        if v.integer {
            *ub = ub.floor();
        }
    }
    for (i, c) in model.cons.iter().enumerate() {
        let (lo, hi) = match c.sense {
            Sense::Le => (f64::NEG_INFINITY, c.rhs),
            Sense::Ge => (c.rhs, f64::INFINITY),
            Sense::Eq => (c.rhs, c.rhs),
        };
        d.row_lb.push(lo);
        d.row_ub.push(hi);
        d.entries.extend(c.coeffs.iter().map(|&(j, a)| (i, j, a)));
    }
    d
}

struct Node {
    bound: f64,
    depth: usize,
    seq: usize,
    bounds: Vec<(usize, f64, f64)>,
    basis: Basis,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // max-heap: smaller bound first, then deeper, then older
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

fn lp_status(s: LpStatus) -> SolveStatus {
    match s {
        LpStatus::Infeasible => SolveStatus::Infeasible,
        LpStatus::Unbounded => SolveStatus::Unbounded,
        LpStatus::IterLimit => SolveStatus::IterLimit,
        LpStatus::Timeout => SolveStatus::Timeout,
        LpStatus::Optimal => unreachable!("optimal carries a solution"),
    }
}

fn branch_and_bound(
    model: &LinearModel,
    data: &LpData,
    limits: &Limits,
    hint: Option<&Basis>,
) -> Result<(SolveStatus, Option<Basis>), SolverError> {
    let deadline = limits.time.map(|t| Instant::now() + t);
    let mut lp = Simplex::new(data);
    lp.deadline = deadline;
    if let Some(b) = hint {
        if b.len() == data.cost.len() + data.row_lb.len() {
            lp.load_basis(b);
        }
    }
    let ints: Vec<usize> = (0..model.num_vars()).filter(|&j| model.vars[j].integer).collect();
    let root_bounds: Vec<(f64, f64)> = ints.iter().map(|&j| lp.col_bounds(j)).collect();

    let st = lp.solve().map_err(|_| SolverError::NumericalBreakdown)?;
    if st != LpStatus::Optimal {
        return Ok((lp_status(st), None));
    }
    let root_basis = lp.basis();
    if ints.is_empty() {
        let x = lp.primal().to_vec();
        let objective = model.objective_value(&x);
        return Ok((SolveStatus::Optimal(Solution { x, objective, nodes: 1 }), Some(root_basis)));
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    heap.push(Node { bound: f64::NEG_INFINITY, depth: 0, seq, bounds: Vec::new(), basis: root_basis.clone() });
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0usize;
    let mut first = true;

    while let Some(node) = heap.pop() {
        if let Some((best, _)) = &incumbent {
            if node.bound >= best - MIP_GAP * best.abs().max(1.0) {
                continue;
            }
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Ok((SolveStatus::Timeout, Some(root_basis)));
        }
        if limits.nodes.is_some_and(|cap| nodes >= cap) {
            return Ok((SolveStatus::IterLimit, Some(root_basis)));
        }
        nodes += 1;
        if !first {
            for (k, &j) in ints.iter().enumerate() {
                lp.set_col_bounds(j, root_bounds[k].0, root_bounds[k].1);
            }
            for &(j, lo, hi) in &node.bounds {
                lp.set_col_bounds(j, lo, hi);
            }
            lp.load_basis(&node.basis);
            let st = lp.solve().map_err(|_| SolverError::NumericalBreakdown)?;
            match st {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => continue,
                LpStatus::Timeout => return Ok((SolveStatus::Timeout, Some(root_basis))),
                other => return Ok((lp_status(other), Some(root_basis))),
            }
        }
        first = false;
        let obj = lp.objective();
        if let Some((best, _)) = &incumbent {
            if obj >= best - MIP_GAP * best.abs().max(1.0) {
                continue;
            }
        }
        let x = lp.primal();
        let branch = ints
            .iter()
            .map(|&j| (j, (x[j] - x[j].round()).abs()))
            .filter(|&(_, f)| f > INT_TOL)
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
        match branch {
            None => {
                let mut sol = x.to_vec();
                for &j in &ints {
                    sol[j] = sol[j].round();
                }
                incumbent = Some((obj, sol));
            }
            Some((j, _)) => {
                let v = x[j];
                let basis = lp.basis();
                let (lo, hi) = node
                    .bounds
                    .iter()
                    .rev()
                    .find(|b| b.0 == j)
                    .map(|b| (b.1, b.2))
                    .unwrap_or_else(|| lp.col_bounds(j));
                for (nlo, nhi) in [(lo, v.floor()), (v.ceil(), hi)] {
                    if nlo > nhi {
                        continue;
                    }
                    seq += 1;
                    let mut bounds = node.bounds.clone();
                    bounds.push((j, nlo, nhi));
                    heap.push(Node { bound: obj, depth: node.depth + 1, seq, bounds, basis: basis.clone() });
                }
            }
        }
    }

    Ok(match incumbent {
        Some((_, x)) => {
            let objective = model.objective_value(&x);
            (SolveStatus::Optimal(Solution { x, objective, nodes }), Some(root_basis))
        }
        None => (SolveStatus::Infeasible, Some(root_basis)),
    })
}
