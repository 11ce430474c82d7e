use std::path::{Path, PathBuf};

use clap::Args;
use fairopt::dualsets::{dual_set_of, DualSet};
use fairopt::measures::{eval_closed_form, MeasureKind, OutcomeVector};
use fairopt::reform::{
    reformulate_order_based_constraint, reformulate_order_based_objective, reformulate_relative_constraint, Mode,
    ProblemInstance,
};
use fairopt::solver::{
    ccg_constraint_with, ccg_objective_with, solve, BundledBackend, CcgIteration, CcgStatus, Limits, SolveStatus,
};
use serde::Serialize;

use super::SCHEMA;
use crate::error::CliError;
use crate::instance::{configure, load, ModelArgs};
use crate::common::{fmt_num, fmt_vec, parse_measure, to_json, write_file};

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Replaces the instance's measure.
    #[arg(long, value_parser = parse_measure)]
    pub measure: Option<MeasureKind>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV iterate log; defaults to the report path with a `.csv` extension.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Measures to compare; all eight table measures by default.
    #[arg(long, value_parser = parse_measure)]
    pub measure: Vec<MeasureKind>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolvePath {
    Direct,
    Ccg,
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub schema: u32,
    pub command: &'static str,
    pub status: CcgStatus,
    pub path: SolvePath,
    pub measure: MeasureKind,
    pub mode: Mode,
    pub objective: Option<f64>,
    pub efficiency: Option<f64>,
    pub fairness: Option<f64>,
    pub gap: Option<f64>,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub iterations: Vec<CcgIteration>,
}

impl SolveReport {
    fn log_csv(&self) -> String {
        let mut out = String::from("j,LB,UB,gap\n");
        for it in &self.iterations {
            out.push_str(&format!("{},{},{},{}\n", it.j, it.lb, it.ub, it.gap));
        }
        out
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn limits(args: &ModelArgs) -> Limits {
    args.time_limit.map_or(Limits::none(), Limits::with_time)
}

/// Singleton dual sets go through the direct single-weight model, the
/// rest through C&CG.
pub fn solve_problem(p: &ProblemInstance, args: &ModelArgs) -> Result<SolveReport, CliError> {
    let n = p.n_subjects();
    let ds = dual_set_of(&p.measure, n).map_err(|e| CliError::Config(e.to_string()))?;
    let limits = limits(args);
    let (status, path, objective, x, u, mut iterations, gap) = match &ds {
        DualSet::Singleton(w) => {
            let built = match p.mode {
                Mode::Objective { .. } => reformulate_order_based_objective(p, w),
                Mode::Constraint { .. } => reformulate_order_based_constraint(p, w),
                Mode::RelativeConstraint { .. } => reformulate_relative_constraint(p, w, ds.wmax()),
            };
            let (model, layout) = built.map_err(|e| CliError::Config(e.to_string()))?;
            match solve(&model, &limits).map_err(|e| CliError::Solver(e.to_string()))? {
                SolveStatus::Optimal(s) => {
                    let it = CcgIteration {
                        j: 1,
                        lb: s.objective,
                        ub: s.objective,
                        gap: 0.0,
                        value: f64::NAN,
                        cut: w.as_slice().to_vec(),
                        master_secs: 0.0,
                        sub_secs: 0.0,
                    };
                    let (x, u) = (layout.extract_x(&s.x), layout.extract_u(&s.x));
                    (CcgStatus::Optimal, SolvePath::Direct, s.objective, x, u, vec![it], 0.0)
                }
                SolveStatus::Infeasible => {
                    (CcgStatus::Infeasible, SolvePath::Direct, f64::INFINITY, vec![], vec![], vec![], f64::INFINITY)
                }
                SolveStatus::Unbounded => return Err(CliError::Solver("model is unbounded".into())),
                other => return Err(CliError::NonConvergence(format!("solver stopped: {}", other.name()))),
            }
        }
        _ => {
            let mut backend = BundledBackend::warm();
            let rep = match p.mode {
                Mode::Objective { .. } => ccg_objective_with(p, &ds, args.eps, &mut backend, &limits)?,
                Mode::Constraint { eta } | Mode::RelativeConstraint { eta } => {
                    ccg_constraint_with(p, &ds, eta, &mut backend, &limits)?
                }
            };
            (rep.status, SolvePath::Ccg, rep.objective, rep.x, rep.u, rep.iterations, rep.gap)
        }
    };
    let (efficiency, fairness) = if status == CcgStatus::Optimal {
        let nu = OutcomeVector::new(u.clone())
            .and_then(|v| eval_closed_form(&p.measure, &v))
            .map_err(|e| CliError::Solver(e.to_string()))?;
        if path == SolvePath::Direct {
            iterations[0].value = nu;
        }
        (Some(p.efficiency(&x, &u)), Some(nu))
    } else {
        (None, None)
    };
    Ok(SolveReport {
        schema: SCHEMA,
        command: "solve",
        status,
        path,
        measure: p.measure.clone(),
        mode: p.mode,
        objective: finite(objective),
        efficiency,
        fairness,
        gap: finite(gap),
        x,
        u,
        iterations,
    })
}

fn log_path(args: &SolveArgs) -> Option<PathBuf> {
    args.log.clone().or_else(|| args.out.as_deref().map(|p: &Path| p.with_extension("csv")))
}

pub fn run(args: SolveArgs) -> Result<(), CliError> {
    let file = load(&args.model.instance)?;
    let p = configure(&file, args.measure.as_ref(), &args.model)?;
    let report = solve_problem(&p, &args.model)?;
    if let Some(path) = &args.out {
        write_file(path, &to_json(&report))?;
    }
    if let Some(path) = log_path(&args) {
        write_file(&path, &report.log_csv())?;
    }
    println!("status     {}", if report.status == CcgStatus::Optimal { "optimal" } else { "infeasible" });
    if report.status == CcgStatus::Infeasible {
        return Err(CliError::Infeasible(format!("no point satisfies the {} budget", p.measure.tag())));
    }
    let path = match report.path {
        SolvePath::Direct => "direct".to_string(),
        SolvePath::Ccg => format!("ccg ({} iterations)", report.iterations.len()),
    };
    println!("path       {path}");
    println!("objective  {}", report.objective.map_or("-".into(), fmt_num));
    println!("fairness   {}", report.fairness.map_or("-".into(), fmt_num));
    println!("x          {}", fmt_vec(&report.x));
    println!("u          {}", fmt_vec(&report.u));
    Ok(())
}

#[derive(Debug, Serialize)]
struct CompareRow {
    measure: MeasureKind,
    status: String,
    objective: Option<f64>,
    efficiency: Option<f64>,
    fairness: Option<f64>,
    x: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct CompareReport {
    schema: u32,
    command: &'static str,
    rows: Vec<CompareRow>,
}

/// Solves under each measure; rows that fail keep their error as status.
pub fn run_compare(args: CompareArgs) -> Result<(), CliError> {
    let file = load(&args.model.instance)?;
    let kinds = if args.measure.is_empty() { MeasureKind::table().to_vec() } else { args.measure.clone() };
    let mut rows = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let p = configure(&file, Some(&kind), &args.model)?;
        let row = match solve_problem(&p, &args.model) {
            Ok(r) => CompareRow {
                measure: kind,
                status: if r.status == CcgStatus::Optimal { "optimal".into() } else { "infeasible".into() },
                objective: r.objective,
                efficiency: r.efficiency,
                fairness: r.fairness,
                x: r.x,
            },
            Err(e) => CompareRow {
                measure: kind,
                status: e.to_string(),
                objective: None,
                efficiency: None,
                fairness: None,
                x: vec![],
            },
        };
        rows.push(row);
    }
    let show = |v: Option<f64>| v.map_or("-".to_string(), fmt_num);
    println!("{:<28} {:>14} {:>14} {:>14}  x", "measure", "objective", "efficiency", "fairness");
    for r in &rows {
        if r.status == "optimal" {
            println!(
                "{:<28} {:>14} {:>14} {:>14}  {}",
                r.measure.tag(),
                show(r.objective),
                show(r.efficiency),
                show(r.fairness),
                fmt_vec(&r.x)
            );
        } else {
            println!("{:<28} {}", r.measure.tag(), r.status);
        }
    }
    if let Some(path) = &args.out {
        write_file(path, &to_json(&CompareReport { schema: SCHEMA, command: "compare", rows }))?;
    }
    Ok(())
}
