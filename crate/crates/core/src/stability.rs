//! Sensitivity of optimal values and solutions to the choice of measure.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dualsets::{dual_set_of, hausdorff, DualSet, DualSetError};
use crate::measures::{sorted, MeasureKind};
use crate::models::{build_ra, random_ra, ModelsError};
use crate::solver::{ccg_objective, CcgError};

/// Absolute slack on the value bound.
pub const BOUND_SLACK: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StabilityError {
    #[error(transparent)]
    DualSet(#[from] DualSetError),
    #[error(transparent)]
    Models(#[from] ModelsError),
    #[error(transparent)]
    Ccg(#[from] CcgError),
    #[error("replication count must be positive")]
    NoReplications,
}

/// `γ·U_max·d_H(W₁, W₂)`.
pub fn stability_bound(ds1: &DualSet, ds2: &DualSet, gamma: f64, umax: f64) -> Result<f64, DualSetError> {
    if gamma == 0.0 {
        return Ok(0.0);
    }
    Ok(gamma * umax * hausdorff(ds1, ds2)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    pub ns: Vec<usize>,
    pub gammas: Vec<f64>,
    pub replications: usize,
    pub base: MeasureKind,
    pub comparisons: Vec<MeasureKind>,
    pub seed: u64,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

fn default_eps() -> f64 {
    1e-9
}

impl StabilityConfig {
    /// `{0, 0.02, …, 2}`, T = 20, MaxMAD against MAD, GD and SMaxPD.
    pub fn standard(ns: Vec<usize>, seed: u64) -> Self {
        StabilityConfig {
            ns,
            gammas: (0..=100).map(|k| k as f64 * 0.02).collect(),
            replications: 20,
            base: MeasureKind::MaxMad,
            comparisons: vec![MeasureKind::Mad, MeasureKind::GiniDeviation, MeasureKind::SumMaxPairwiseDeviation],
            seed,
            eps: default_eps(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCell {
    pub gamma: f64,
    /// Mean `|υ₀ − υ_k|`.
    pub val_diff: f64,
    /// Mean `‖x₀ − x_k‖₂`.
    pub sol_diff: f64,
    /// Mean of the instance-wise value bounds.
    pub bound: f64,
    pub bound_ok: bool,
    /// Largest `|υ₀ − υ_k| − bound` seen.
    pub worst_excess: f64,
    pub distance_bound_ok: bool,
    /// Solution bound needs a growth constant that is not available.
    pub solution_bound: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub n: usize,
    pub base: MeasureKind,
    pub other: MeasureKind,
    /// Distance between the normalized dual sets.
    pub d_h: f64,
    pub cells: Vec<StabilityCell>,
}

impl StabilityReport {
    pub fn pair(&self) -> String {
        format!("{}-{}", self.base.short_name(), self.other.short_name())
    }
}

/// Columns `N,gamma,pair,val_diff,sol_diff,d_H,bound,bound_ok`.
pub fn reports_to_csv(reports: &[StabilityReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["N", "gamma", "pair", "val_diff", "sol_diff", "d_H", "bound", "bound_ok"])
        .expect("in-memory write");
    for r in reports {
        for c in &r.cells {
            w.serialize((r.n, c.gamma, r.pair(), c.val_diff, c.sol_diff, r.d_h, c.bound, c.bound_ok))
                .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
}

fn instance_seed(seed: u64, n: usize, t: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | t as u64);
    rng.next_u64()
}

struct Solved {
    value: f64,
    x: Vec<f64>,
    u: Vec<f64>,
}

fn solve_ra(kind: &MeasureKind, n: usize, gamma: f64, seed: u64, eps: f64) -> Result<(Solved, f64), StabilityError> {
    let ai = random_ra(n, gamma, kind.clone(), seed)?;
    let p = build_ra(&ai)?;
    let ds = dual_set_of(kind, n)?;
    let rep = ccg_objective(&p, &ds, eps)?;
    Ok((Solved { value: rep.objective, x: rep.x, u: rep.u }, ai.umax()))
}

fn distance_bound_holds(a: &DualSet, b: &DualSet, d_h: f64, u: &[f64]) -> bool {
    let s = sorted(u);
    let (v1, _) = a.support_sorted(&s);
    let (v2, _) = b.support_sorted(&s);
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    (v1 - v2).abs() <= d_h * norm + BOUND_SLACK * (1.0 + norm)
}

/// Solves the same random allocation instances under the base measure and
/// each comparison measure over the γ grid. Instances depend only on
/// `(seed, N, t)`, so every γ and pair sees the same draws.
pub fn run_stability_experiment(cfg: &StabilityConfig) -> Result<Vec<StabilityReport>, StabilityError> {
    if cfg.replications == 0 {
        return Err(StabilityError::NoReplications);
    }
    let mut out = Vec::new();
    for &n in &cfg.ns {
        let base_ds = dual_set_of(&cfg.base, n)?.normalized();
        let mut base_runs: Vec<Vec<(Solved, f64)>> = Vec::with_capacity(cfg.gammas.len());
        for &g in &cfg.gammas {
            let row = (0..cfg.replications)
                .map(|t| solve_ra(&cfg.base, n, g, instance_seed(cfg.seed, n, t), cfg.eps))
                .collect::<Result<Vec<_>, _>>()?;
            base_runs.push(row);
        }
        for other in &cfg.comparisons {
            let other_ds = dual_set_of(other, n)?.normalized();
            let d_h = hausdorff(&base_ds, &other_ds)?;
            let mut cells = Vec::with_capacity(cfg.gammas.len());
            for (gi, &g) in cfg.gammas.iter().enumerate() {
                let (mut val, mut sol, mut bnd) = (0.0, 0.0, 0.0);
                let (mut bound_ok, mut distance_bound_ok) = (true, true);
                let mut worst = f64::NEG_INFINITY;
                for t in 0..cfg.replications {
                    let (b, umax) = &base_runs[gi][t];
                    let (o, _) = solve_ra(other, n, g, instance_seed(cfg.seed, n, t), cfg.eps)?;
                    let diff = (b.value - o.value).abs();
                    let bound = g * umax * d_h;
                    worst = worst.max(diff - bound);
                    bound_ok &= diff <= bound + BOUND_SLACK;
                    distance_bound_ok &= distance_bound_holds(&base_ds, &other_ds, d_h, &b.u);
                    distance_bound_ok &= distance_bound_holds(&base_ds, &other_ds, d_h, &o.u);
                    val += diff;
                    sol += b.x.iter().zip(&o.x).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
                    bnd += bound;
                }
                let t = cfg.replications as f64;
                cells.push(StabilityCell {
                    gamma: g,
                    val_diff: val / t,
                    sol_diff: sol / t,
                    bound: bnd / t,
                    bound_ok,
                    worst_excess: worst,
                    distance_bound_ok,
                    solution_bound: None,
                });
            }
            out.push(StabilityReport { n, base: cfg.base.clone(), other: other.clone(), d_h, cells });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_bounds() {
        let a = dual_set_of(&MeasureKind::Mad, 4).unwrap();
        let b = dual_set_of(&MeasureKind::Range, 4).unwrap();
        assert_eq!(stability_bound(&a, &a, 1.0, 10.0).unwrap(), 0.0);
        assert_eq!(stability_bound(&a, &b, 0.0, 10.0).unwrap(), 0.0);
        assert!(stability_bound(&a, &b, 1.0, 10.0).unwrap() > 0.0);
    }

    #[test]
    fn same_kind_gives_zero() {
        let cfg = StabilityConfig {
            ns: vec![4],
            gammas: vec![0.0, 1.0],
            replications: 1,
            base: MeasureKind::Mad,
            comparisons: vec![MeasureKind::Mad],
            seed: 5,
            eps: 1e-9,
        };
        let r = run_stability_experiment(&cfg).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].d_h, 0.0);
        for c in &r[0].cells {
            assert_eq!(c.val_diff, 0.0);
            assert_eq!(c.sol_diff, 0.0);
            assert!(c.bound_ok);
        }
    }

    #[test]
    fn csv_columns() {
        let cfg = StabilityConfig {
            ns: vec![3],
            gammas: vec![0.5],
            replications: 2,
            base: MeasureKind::MaxMad,
            comparisons: vec![MeasureKind::Range],
            seed: 1,
            eps: 1e-9,
        };
        let csv = reports_to_csv(&run_stability_experiment(&cfg).unwrap());
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "N,gamma,pair,val_diff,sol_diff,d_H,bound,bound_ok");
        assert!(lines.next().unwrap().starts_with("3,0.5,MaxMAD-Range,"));
    }
}
