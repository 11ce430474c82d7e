//! Column-and-constraint generation over a dual set.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Backend, BundledBackend, Limits, SolveStatus, SolverError};
use crate::dualsets::{vertices, BallNorm, DualSet, DualSetError};
use crate::measures::sorted;
use crate::reform::{add_cut, build_ccg_master, Mode, ProblemInstance, ReformError};

/// Relative tolerance when testing `D ≤ η` in constraint mode.
pub const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CcgError {
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("instance mode does not match the requested loop")]
    ModeMismatch,
    #[error("master problem is infeasible")]
    MasterInfeasible,
    #[error("master problem ended with status {0}")]
    MasterStatus(&'static str),
    #[error("no convergence after {iterations} iterations (gap {gap})")]
    NonConvergence { iterations: usize, gap: f64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Reform(#[from] ReformError),
    #[error(transparent)]
    DualSet(#[from] DualSetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CcgStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcgIteration {
    pub j: usize,
    pub lb: f64,
    pub ub: f64,
    pub gap: f64,
    /// Subproblem value `D^j`.
    pub value: f64,
    pub cut: Vec<f64>,
    pub master_secs: f64,
    pub sub_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcgReport {
    pub status: CcgStatus,
    pub iterations: Vec<CcgIteration>,
    pub gap: f64,
    pub objective: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    /// Measure value at the incumbent.
    pub fairness: f64,
}

impl CcgReport {
    /// One row per iteration: `j,LB,UB,gap`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["j", "LB", "UB", "gap"]).expect("in-memory write");
        for it in &self.iterations {
            w.serialize((it.j, it.lb, it.ub, it.gap)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }
}

fn gap(lb: f64, ub: f64) -> f64 {
    if !ub.is_finite() {
        f64::INFINITY
    } else if ub == 0.0 {
        ub - lb
    } else {
        (ub - lb) / ub.abs()
    }
}

/// `10·|V|` for polytope sets, 200 for curved balls.
pub fn iteration_cap(ds: &DualSet) -> usize {
    match ds {
        DualSet::NormBall { n, q: BallNorm::L2, .. } if *n > 2 => 200,
        _ => 10 * vertices(ds).map(|v| v.len()).unwrap_or(20).max(1),
    }
}

fn same_cut(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9)
}

fn check_dims(p: &ProblemInstance, ds: &DualSet) -> Result<(), CcgError> {
    if ds.dim() != p.n_subjects() {
        return Err(DualSetError::DimensionMismatch { expected: p.n_subjects(), got: ds.dim() }.into());
    }
    Ok(())
}

fn solve_master(
    backend: &mut dyn Backend,
    model: &crate::reform::LinearModel,
    limits: &Limits,
) -> Result<Option<Vec<f64>>, CcgError> {
    match backend.solve(model, limits)? {
        SolveStatus::Optimal(s) => Ok(Some(s.x)),
        SolveStatus::Infeasible => Ok(None),
        other => Err(CcgError::MasterStatus(other.name())),
    }
}

/// Objective-form loop with the bundled warm-started backend.
pub fn ccg_objective(p: &ProblemInstance, ds: &DualSet, eps: f64) -> Result<CcgReport, CcgError> {
    ccg_objective_with(p, ds, eps, &mut BundledBackend::warm(), &Limits::none())
}

/// Objective-form loop: master over the current cuts gives LB, the
/// subproblem at the master's `u` gives UB; stop when the gap drops
/// below `eps`. Starts from the zero cut.
pub fn ccg_objective_with(
    p: &ProblemInstance,
    ds: &DualSet,
    eps: f64,
    backend: &mut dyn Backend,
    limits: &Limits,
) -> Result<CcgReport, CcgError> {
    if !(eps > 0.0) {
        return Err(CcgError::InvalidTolerance(eps));
    }
    let Mode::Objective { .. } = p.mode else {
        return Err(CcgError::ModeMismatch);
    };
    check_dims(p, ds)?;
    let n = p.n_subjects();
    let weight = p.fairness_weight();
    let wmax = ds.wmax();
    let cap = iteration_cap(ds);
    let (mut model, layout) = build_ccg_master(p, &[vec![0.0; n]], wmax)?;
    let mut cuts: Vec<Vec<f64>> = vec![vec![0.0; n]];
    let (mut lb, mut ub) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut best: Option<(Vec<f64>, Vec<f64>, f64)> = None;
    let mut iterations = Vec::new();

    for j in 1..=cap {
        let t0 = Instant::now();
        let sol = solve_master(backend, &model, limits)?.ok_or(CcgError::MasterInfeasible)?;
        let master_secs = t0.elapsed().as_secs_f64();
        lb = lb.max(model.objective_value(&sol));
        let x = layout.extract_x(&sol);
        let u = layout.extract_u(&sol);

        let t1 = Instant::now();
        let (value, w) = ds.support_sorted(&sorted(&u));
        let sub_secs = t1.elapsed().as_secs_f64();
        let candidate = p.efficiency(&x, &u) + weight * value;
        if candidate < ub {
            ub = candidate;
            best = Some((x, u, value));
        }
        let g = gap(lb, ub);
        iterations.push(CcgIteration { j, lb, ub, gap: g, value, cut: w.clone(), master_secs, sub_secs });
        // a repeated cut means the master already prices D^j
        let repeated = cuts.iter().any(|c| same_cut(c, &w));
        if g < eps || repeated || weight == 0.0 {
            let (x, u, fairness) = best.expect("at least one iterate");
            return Ok(CcgReport { status: CcgStatus::Optimal, iterations, gap: g, objective: ub, x, u, fairness });
        }
        add_cut(&mut model, &layout, p, &w, cuts.len(), wmax);
        cuts.push(w);
    }
    Err(CcgError::NonConvergence { iterations: cap, gap: gap(lb, ub) })
}

/// Constraint-form loop with the bundled warm-started backend.
pub fn ccg_constraint(p: &ProblemInstance, ds: &DualSet, eta: f64) -> Result<CcgReport, CcgError> {
    ccg_constraint_with(p, ds, eta, &mut BundledBackend::warm(), &Limits::none())
}

/// Constraint-form loop: an infeasible master proves the full problem
/// infeasible; a master solution whose measure value respects the bound
/// is optimal. `eta` replaces the bound stored in the instance.
pub fn ccg_constraint_with(
    p: &ProblemInstance,
    ds: &DualSet,
    eta: f64,
    backend: &mut dyn Backend,
    limits: &Limits,
) -> Result<CcgReport, CcgError> {
    let mut p = p.clone();
    let relative = match p.mode {
        Mode::Constraint { .. } => {
            p.mode = Mode::Constraint { eta };
            false
        }
        Mode::RelativeConstraint { .. } => {
            p.mode = Mode::RelativeConstraint { eta };
            true
        }
        Mode::Objective { .. } => return Err(CcgError::ModeMismatch),
    };
    check_dims(&p, ds)?;
    let n = p.n_subjects();
    let wmax = ds.wmax();
    let cap = iteration_cap(ds);
    let (mut model, layout) = build_ccg_master(&p, &[vec![0.0; n]], wmax)?;
    let mut cuts: Vec<Vec<f64>> = vec![vec![0.0; n]];
    let mut lb = f64::NEG_INFINITY;
    let mut iterations = Vec::new();

    for j in 1..=cap {
        let t0 = Instant::now();
        let sol = solve_master(backend, &model, limits)?;
        let master_secs = t0.elapsed().as_secs_f64();
        let Some(sol) = sol else {
            return Ok(CcgReport {
                status: CcgStatus::Infeasible,
                iterations,
                gap: f64::INFINITY,
                objective: f64::INFINITY,
                x: vec![],
                u: vec![],
                fairness: f64::NAN,
            });
        };
        let obj = model.objective_value(&sol);
        lb = lb.max(obj);
        let x = layout.extract_x(&sol);
        let u = layout.extract_u(&sol);

        let t1 = Instant::now();
        let (value, w) = ds.support_sorted(&sorted(&u));
        let sub_secs = t1.elapsed().as_secs_f64();
        let threshold = if relative {
            eta * wmax * u.iter().sum::<f64>()
        } else {
            eta / p.fairness_scale
        };
        let feasible = value <= threshold + FEAS_TOL * threshold.abs().max(1.0);
        let ub = if feasible { obj } else { f64::INFINITY };
        let g = gap(lb, ub);
        iterations.push(CcgIteration { j, lb, ub, gap: g, value, cut: w.clone(), master_secs, sub_secs });
        if feasible {
            return Ok(CcgReport { status: CcgStatus::Optimal, iterations, gap: g, objective: obj, x, u, fairness: value });
        }
        if cuts.iter().any(|c| same_cut(c, &w)) {
            return Err(CcgError::NonConvergence { iterations: j, gap: g });
        }
        add_cut(&mut model, &layout, &p, &w, cuts.len(), wmax);
        cuts.push(w);
    }
    Err(CcgError::NonConvergence { iterations: cap, gap: f64::INFINITY })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dualsets::dual_set_of;
    use crate::measures::MeasureKind;
    use crate::reform::{Sense, XRow, XVar};

    fn ra(a: &[f64], r: f64, gamma: f64, kind: MeasureKind) -> ProblemInstance {
        let n = a.len();
        ProblemInstance {
            a: (0..n).map(|i| (0..n).map(|j| if i == j { a[i] } else { 0.0 }).collect()).collect(),
            b: vec![0.0; n],
            x: (0..n).map(|j| XVar { name: format!("x_{j}"), lb: 0.0, ub: r, integer: false }).collect(),
            rows: vec![XRow { coeffs: (0..n).map(|j| (j, 1.0)).collect(), sense: Sense::Le, rhs: r }],
            c: vec![0.0; n],
            d: vec![-1.0; n],
            measure: kind,
            mode: Mode::Objective { gamma },
            fairness_scale: 1.0,
            nonnegative_outcomes: true,
            outcome_range: None,
        }
    }

    #[test]
    fn singleton_two_iterations() {
        let p = ra(&[1.0, 2.0, 3.0], 10.0, 0.5, MeasureKind::GiniDeviation);
        let ds = dual_set_of(&p.measure, 3).unwrap();
        let rep = ccg_objective(&p, &ds, 1e-6).unwrap();
        assert!(rep.iterations.len() <= 2);
        assert!(rep.gap.abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_eps_and_mode() {
        let p = ra(&[1.0, 2.0], 1.0, 0.5, MeasureKind::Range);
        let ds = dual_set_of(&p.measure, 2).unwrap();
        assert_eq!(ccg_objective(&p, &ds, 0.0).unwrap_err(), CcgError::InvalidTolerance(0.0));
        assert_eq!(ccg_constraint(&p, &ds, 1.0).unwrap_err(), CcgError::ModeMismatch);
    }

    #[test]
    fn csv_layout() {
        let p = ra(&[1.0, 2.0, 3.0], 10.0, 0.5, MeasureKind::Mad);
        let ds = dual_set_of(&p.measure, 3).unwrap();
        let rep = ccg_objective(&p, &ds, 1e-6).unwrap();
        let csv = rep.to_csv();
        assert!(csv.starts_with("j,LB,UB,gap\n1,"));
        assert_eq!(csv.lines().count(), rep.iterations.len() + 1);
    }
}
