//! Fair facility location and fair resource allocation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::{measure_wmax, MeasureKind};
use crate::reform::{Mode, OutcomeRange, ProblemInstance, Sense, XRow, XVar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelsError {
    #[error("facility count p={p} must satisfy 1 <= p < {sites}")]
    InvalidP { p: usize, sites: usize },
    #[error("demand {0} is not positive")]
    NonPositiveDemand(usize),
    #[error("efficiency {0} is not finite and positive")]
    InvalidEfficiency(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

/// Planar p-median instance. `sites` defaults to the customer points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacilityInstance {
    pub points: Vec<[f64; 2]>,
    pub demands: Vec<f64>,
    #[serde(default)]
    pub sites: Option<Vec<[f64; 2]>>,
    pub p: usize,
    pub gamma: f64,
    pub measure: MeasureKind,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl FacilityInstance {
    pub fn customers(&self) -> usize {
        self.points.len()
    }

    pub fn site_points(&self) -> &[[f64; 2]] {
        self.sites.as_deref().unwrap_or(&self.points)
    }

    /// Euclidean distances `c_ij`.
    pub fn costs(&self) -> Vec<Vec<f64>> {
        self.points
            .iter()
            .map(|a| self.site_points().iter().map(|b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()).collect())
            .collect()
    }

    pub fn validate(&self) -> Result<(), ModelsError> {
        let sites = self.site_points().len();
        if self.p < 1 || self.p >= sites {
            return Err(ModelsError::InvalidP { p: self.p, sites });
        }
        if self.demands.len() != self.points.len() {
            return Err(ModelsError::InvalidParameter("one demand per customer"));
        }
        if let Some(i) = self.demands.iter().position(|d| !(*d > 0.0 && d.is_finite())) {
            return Err(ModelsError::NonPositiveDemand(i));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(ModelsError::InvalidParameter("gamma must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Cost matrix as CSV, one row per customer.
    pub fn cost_csv(&self) -> String {
        let c = self.costs();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["customer".to_string()];
        header.extend((0..self.site_points().len()).map(|j| format!("site_{j}")));
        w.write_record(&header).expect("in-memory write");
        for (i, row) in c.iter().enumerate() {
            let mut rec = vec![i.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
    }

    /// Index of `y_ij` in the decision vector.
    pub fn y_index(&self, i: usize, j: usize) -> usize {
        let m = self.site_points().len();
        m + i * m + j
    }

    /// Open sites read off a solution vector.
    pub fn open_sites(&self, x: &[f64]) -> Vec<usize> {
        (0..self.site_points().len()).filter(|&j| x[j] > 0.5).collect()
    }

    /// Site serving each customer, if exactly one.
    pub fn assignment(&self, x: &[f64]) -> Vec<Option<usize>> {
        let m = self.site_points().len();
        (0..self.customers())
            .map(|i| {
                let hits: Vec<usize> = (0..m).filter(|&j| x[self.y_index(i, j)] > 0.5).collect();
                (hits.len() == 1).then(|| hits[0])
            })
            .collect()
    }
}

/// Sum `γΣr + (1−γ)ν(r)` with `r_i = Σ_j d_i c_ij y_ij`. Gini deviation
/// is scaled by `1/|I|`.
pub fn build_flp(fi: &FacilityInstance) -> Result<ProblemInstance, ModelsError> {
    fi.validate()?;
    let (n, m) = (fi.customers(), fi.site_points().len());
    let cost = fi.costs();
    let mut x: Vec<XVar> = (0..m).map(|j| XVar { name: format!("x_{j}"), lb: 0.0, ub: 1.0, integer: true }).collect();
    for i in 0..n {
        for j in 0..m {
            x.push(XVar { name: format!("y_{i}_{j}"), lb: 0.0, ub: 1.0, integer: true });
        }
    }
    let nx = x.len();
    let mut rows = vec![XRow { coeffs: (0..m).map(|j| (j, 1.0)).collect(), sense: Sense::Eq, rhs: fi.p as f64 }];
    for i in 0..n {
        rows.push(XRow { coeffs: (0..m).map(|j| (fi.y_index(i, j), 1.0)).collect(), sense: Sense::Eq, rhs: 1.0 });
    }
    for i in 0..n {
        for j in 0..m {
            rows.push(XRow { coeffs: vec![(fi.y_index(i, j), 1.0), (j, -1.0)], sense: Sense::Le, rhs: 0.0 });
        }
    }
    let mut a = vec![vec![0.0; nx]; n];
    let (mut umin, mut umax) = (f64::INFINITY, 0.0f64);
    for i in 0..n {
        for j in 0..m {
            let v = fi.demands[i] * cost[i][j];
            a[i][fi.y_index(i, j)] = v;
            umin = umin.min(v);
            umax = umax.max(v);
        }
    }
    let scale = if fi.measure == MeasureKind::GiniDeviation { 1.0 / n as f64 } else { 1.0 };
    Ok(ProblemInstance {
        a,
        b: vec![0.0; n],
        x,
        rows,
        c: vec![0.0; nx],
        d: vec![fi.gamma; n],
        measure: fi.measure.clone(),
        mode: Mode::Objective { gamma: 1.0 - fi.gamma },
        fairness_scale: scale,
        nonnegative_outcomes: true,
        outcome_range: Some(OutcomeRange { umin: umin.min(0.0), umax }),
    })
}

/// Uniform points in the unit square, demands on `[1, 100]`, sites at
/// the customers.
pub fn random_flp(n: usize, p: usize, gamma: f64, measure: MeasureKind, seed: u64) -> Result<FacilityInstance, ModelsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let demands = (0..n).map(|_| rng.gen_range(1.0..=100.0)).collect();
    let fi = FacilityInstance { points, demands, sites: None, p, gamma, measure, seed: Some(seed) };
    fi.validate()?;
    Ok(fi)
}

/// Resource allocation with `u_i = a_i x_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationInstance {
    pub a: Vec<f64>,
    pub budget: f64,
    #[serde(default)]
    pub cap: Option<f64>,
    /// Spend the whole budget.
    #[serde(default)]
    pub budget_equality: bool,
    pub gamma: f64,
    pub measure: MeasureKind,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl AllocationInstance {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn validate(&self) -> Result<(), ModelsError> {
        if self.a.len() < 2 {
            return Err(ModelsError::InvalidParameter("need at least two subjects"));
        }
        if let Some(i) = self.a.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(ModelsError::InvalidEfficiency(i));
        }
        if !(self.budget > 0.0 && self.budget.is_finite()) {
            return Err(ModelsError::InvalidParameter("budget must be positive"));
        }
        if self.cap.is_some_and(|k| !(k >= 0.0)) {
            return Err(ModelsError::InvalidParameter("cap must be nonnegative"));
        }
        if self.budget_equality && self.cap.is_some_and(|k| k * (self.n() as f64) < self.budget) {
            return Err(ModelsError::InvalidParameter("caps cannot absorb the budget"));
        }
        if !(self.gamma >= 0.0) {
            return Err(ModelsError::InvalidParameter("gamma must be nonnegative"));
        }
        Ok(())
    }

    /// Largest outcome reachable by a single subject.
    pub fn umax(&self) -> f64 {
        let ub = self.cap.map_or(self.budget, |k| k.min(self.budget));
        self.a.iter().fold(0.0f64, |m, a| m.max(a * ub))
    }
}

/// `min −1ᵀu + γ·ν(u)/w_max` over the budget row.
pub fn build_ra(ai: &AllocationInstance) -> Result<ProblemInstance, ModelsError> {
    ai.validate()?;
    let n = ai.n();
    let ub = ai.cap.map_or(ai.budget, |k| k.min(ai.budget));
    let wmax = measure_wmax(&ai.measure, n);
    Ok(ProblemInstance {
        a: (0..n).map(|i| (0..n).map(|j| if i == j { ai.a[i] } else { 0.0 }).collect()).collect(),
        b: vec![0.0; n],
        x: (0..n).map(|j| XVar { name: format!("x_{j}"), lb: 0.0, ub, integer: false }).collect(),
        rows: vec![XRow {
            coeffs: (0..n).map(|j| (j, 1.0)).collect(),
            sense: if ai.budget_equality { Sense::Eq } else { Sense::Le },
            rhs: ai.budget,
        }],
        c: vec![0.0; n],
        d: vec![-1.0; n],
        measure: ai.measure.clone(),
        mode: Mode::Objective { gamma: ai.gamma },
        fairness_scale: if wmax > 0.0 { 1.0 / wmax } else { 1.0 },
        nonnegative_outcomes: true,
        outcome_range: Some(OutcomeRange { umin: 0.0, umax: ai.umax() }),
    })
}

/// Efficiencies on `[1, 10]`, budget 100, no cap.
pub fn random_ra(n: usize, gamma: f64, measure: MeasureKind, seed: u64) -> Result<AllocationInstance, ModelsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = (0..n).map(|_| rng.gen_range(1.0..=10.0)).collect();
    let ai = AllocationInstance { a, budget: 100.0, cap: None, budget_equality: false, gamma, measure, seed: Some(seed) };
    ai.validate()?;
    Ok(ai)
}
