//! Brute-force reference computations for cross-checking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::dualsets::{vertices, BallNorm, DualSet, DualSetError};
use crate::measures::{eval_closed_form, MeasureError, OutcomeVector};
use crate::models::FacilityInstance;
use crate::reform::{Mode, ProblemInstance, Sense};

pub const MAX_PERMUTATION_DIM: usize = 8;
pub const MAX_SAMPLED_DIM: usize = 5;
pub const MAX_LATTICE_POINTS: u64 = 10_000_000;
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("problem too large for brute force: {0}")]
    TooLarge(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("sampling needs a norm-ball set")]
    NotBall,
    #[error("no feasible point")]
    Infeasible,
    #[error("invalid lattice: {0}")]
    InvalidLattice(&'static str),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    DualSet(#[from] DualSetError),
}

/// `max_π Σ w_π(i) u_i` over all `N!` permutations (Heap's algorithm).
pub fn permutation_sup(w: &[f64], u: &[f64]) -> Result<f64, OracleError> {
    let n = w.len();
    if n != u.len() {
        return Err(OracleError::DimensionMismatch(n, u.len()));
    }
    if n > MAX_PERMUTATION_DIM {
        return Err(OracleError::TooLarge(format!("{n}! permutations")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let value = |p: &[usize]| p.iter().zip(u).map(|(&k, x)| w[k] * x).sum::<f64>();
    let mut best = value(&perm);
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            best = best.max(value(&perm));
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(best)
}

fn sample_ball_point(rng: &mut ChaCha8Rng, n: usize, q: BallNorm, r: f64) -> Vec<f64> {
    match q {
        BallNorm::Inf => (0..n)
            .map(|_| if rng.gen_bool(0.5) { if rng.gen_bool(0.5) { r } else { -r } } else { rng.gen_range(-r..=r) })
            .collect(),
        BallNorm::L1 => {
            if rng.gen_bool(0.5) {
                let mut w = vec![0.0; n];
                w[rng.gen_range(0..n)] = if rng.gen_bool(0.5) { r } else { -r };
                w
            } else {
                let e: Vec<f64> = (0..n).map(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
                let s: f64 = e.iter().sum::<f64>() + -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln();
                e.iter().map(|x| if rng.gen_bool(0.5) { r * x / s } else { -r * x / s }).collect()
            }
        }
        BallNorm::L2 => {
            let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            g.iter().map(|x| r * x / norm).collect()
        }
    }
}

fn ball_norm(w: &[f64], q: BallNorm) -> f64 {
    match q {
        BallNorm::Inf => w.iter().fold(0.0, |m, x| m.max(x.abs())),
        BallNorm::L1 => w.iter().map(|x| x.abs()).sum(),
        BallNorm::L2 => w.iter().map(|x| x * x).sum::<f64>().sqrt(),
    }
}

/// Lower estimate of a ball set's support value: `w′` drawn in the ball,
/// sorted, norm re-checked, then centered.
pub fn sampled_support(ds: &DualSet, u: &[f64], samples: usize, seed: u64) -> Result<f64, OracleError> {
    let DualSet::NormBall { n, q, radius } = ds else {
        return Err(OracleError::NotBall);
    };
    let n = *n;
    if u.len() != n {
        return Err(OracleError::DimensionMismatch(n, u.len()));
    }
    if n > MAX_SAMPLED_DIM {
        return Err(OracleError::TooLarge(format!("sampling in dimension {n}")));
    }
    let mut us = u.to_vec();
    us.sort_by(f64::total_cmp);
    let ubar = us.iter().sum::<f64>() / n as f64;
    us.iter_mut().for_each(|x| *x -= ubar);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..samples {
        let mut w = sample_ball_point(&mut rng, n, *q, *radius);
        w.sort_by(f64::total_cmp);
        if ball_norm(&w, *q) > radius * (1.0 + 1e-12) {
            continue;
        }
        let mean = w.iter().sum::<f64>() / n as f64;
        best = best.max(w.iter().zip(&us).map(|(a, b)| (a - mean) * b).sum());
    }
    Ok(best)
}

fn support(points: &[Vec<f64>], d: &[f64]) -> f64 {
    points
        .iter()
        .map(|p| p.iter().zip(d).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

fn unit(mut d: Vec<f64>) -> Option<Vec<f64>> {
    let norm = d.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-300 {
        return None;
    }
    d.iter_mut().for_each(|x| *x /= norm);
    Some(d)
}

/// `sup_{‖d‖=1} |h_P(d) − h_Q(d)|` over point sets, by random directions
/// followed by shrinking random local search around the best ones.
pub fn sampled_hausdorff(p: &[Vec<f64>], q: &[Vec<f64>], samples: usize, seed: u64) -> Result<f64, OracleError> {
    let n = p.first().map_or(0, Vec::len);
    if let Some(bad) = p.iter().chain(q).find(|v| v.len() != n) {
        return Err(OracleError::DimensionMismatch(n, bad.len()));
    }
    let gap = |d: &[f64]| (support(p, d) - support(q, d)).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<(f64, Vec<f64>)> = Vec::new();
    for _ in 0..samples {
        let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(d) = unit(g) {
            pool.push((gap(&d), d));
        }
    }
    pool.sort_by(|a, b| b.0.total_cmp(&a.0));
    pool.truncate(16);
    let mut best = pool.first().map_or(0.0, |b| b.0);
    for (mut val, mut d) in pool {
        let mut step = 0.1;
        while step > 1e-10 {
            let mut improved = false;
            for _ in 0..40 {
                let trial: Vec<f64> = d.iter().map(|x| x + step * rng.sample::<f64, _>(StandardNormal)).collect();
                if let Some(t) = unit(trial) {
                    let v = gap(&t);
                    if v > val {
                        val = v;
                        d = t;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.max(val);
    }
    Ok(best)
}

/// [`sampled_hausdorff`] on the vertex lists of two polytope sets.
pub fn sampled_hausdorff_sets(a: &DualSet, b: &DualSet, samples: usize, seed: u64) -> Result<f64, OracleError> {
    sampled_hausdorff(&vertices(a)?, &vertices(b)?, samples, seed)
}

/// Axis-aligned grid over the `x` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub step: Vec<f64>,
}

impl LatticeSpec {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, step: Vec<f64>) -> Result<Self, OracleError> {
        if lower.len() != upper.len() || lower.len() != step.len() {
            return Err(OracleError::InvalidLattice("bounds and steps differ in length"));
        }
        if step.iter().any(|s| !(*s > 0.0)) {
            return Err(OracleError::InvalidLattice("step must be positive"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(OracleError::InvalidLattice("lower exceeds upper"));
        }
        let spec = LatticeSpec { lower, upper, step };
        let total = spec.counts().iter().try_fold(1u64, |acc, &c| acc.checked_mul(c));
        match total {
            Some(t) if t <= MAX_LATTICE_POINTS => Ok(spec),
            _ => Err(OracleError::TooLarge("lattice exceeds 10^7 points".into())),
        }
    }

    fn counts(&self) -> Vec<u64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .zip(&self.step)
            .map(|((l, u), s)| ((u - l) / s + 1e-9).floor() as u64 + 1)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeOptimum {
    pub value: f64,
    pub x: Vec<f64>,
}

fn instance_value(p: &ProblemInstance, x: &[f64]) -> Result<Option<f64>, OracleError> {
    for (v, xv) in p.x.iter().zip(x) {
        if *xv < v.lb - FEAS_TOL || *xv > v.ub + FEAS_TOL {
            return Ok(None);
        }
    }
    for row in &p.rows {
        let lhs: f64 = row.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
        let ok = match row.sense {
            Sense::Le => lhs <= row.rhs + FEAS_TOL,
            Sense::Ge => lhs >= row.rhs - FEAS_TOL,
            Sense::Eq => (lhs - row.rhs).abs() <= FEAS_TOL,
        };
        if !ok {
            return Ok(None);
        }
    }
    let u = p.outcomes(x);
    if p.nonnegative_outcomes && u.iter().any(|v| *v < -FEAS_TOL) {
        return Ok(None);
    }
    let eff = p.efficiency(x, &u);
    let nu = eval_closed_form(&p.measure, &OutcomeVector::new(u.clone())?)?;
    Ok(match p.mode {
        Mode::Objective { gamma } => Some(eff + gamma * p.fairness_scale * nu),
        Mode::Constraint { eta } => (p.fairness_scale * nu <= eta + FEAS_TOL).then_some(eff),
        Mode::RelativeConstraint { eta } => {
            let wmax = crate::measures::measure_wmax(&p.measure, u.len());
            (nu <= eta * wmax * u.iter().sum::<f64>() + FEAS_TOL).then_some(eff)
        }
    })
}

/// Exhaustive minimum of the exact objective over a grid on `x`.
pub fn lattice_solve(p: &ProblemInstance, spec: &LatticeSpec) -> Result<LatticeOptimum, OracleError> {
    if spec.lower.len() != p.n_x() {
        return Err(OracleError::DimensionMismatch(p.n_x(), spec.lower.len()));
    }
    let counts = spec.counts();
    let mut idx = vec![0u64; counts.len()];
    let mut best: Option<LatticeOptimum> = None;
    loop {
        let x: Vec<f64> = idx
            .iter()
            .zip(&spec.lower)
            .zip(&spec.step)
            .map(|((&k, l), s)| l + k as f64 * s)
            .collect();
        if let Some(v) = instance_value(p, &x)? {
            if best.as_ref().is_none_or(|b| v < b.value) {
                best = Some(LatticeOptimum { value: v, x });
            }
        }
        let mut d = 0;
        loop {
            if d == idx.len() {
                return best.ok_or(OracleError::Infeasible);
            }
            idx[d] += 1;
            if idx[d] < counts[d] {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

/// Facility location by enumerating every open set of size `p` and every
/// assignment of customers to open sites. Returns the optimum and the
/// decision vector in the layout of the facility model.
pub fn enumerate_flp(fi: &FacilityInstance) -> Result<LatticeOptimum, OracleError> {
    let m = fi.site_points().len();
    let n = fi.customers();
    let binom = (0..fi.p).fold(1u64, |acc, k| acc * (m - k) as u64 / (k + 1) as u64);
    let total = (fi.p as u64).checked_pow(n as u32).and_then(|a| a.checked_mul(binom));
    if !total.is_some_and(|t| t <= MAX_LATTICE_POINTS) {
        return Err(OracleError::TooLarge("facility enumeration".into()));
    }
    if fi.p == 0 || fi.p >= m {
        return Err(OracleError::Infeasible);
    }
    let cost = fi.costs();
    let scale = if fi.measure == crate::measures::MeasureKind::GiniDeviation { 1.0 / n as f64 } else { 1.0 };
    let mut best: Option<(f64, Vec<usize>, Vec<usize>)> = None;
    let mut open: Vec<usize> = (0..fi.p).collect();
    loop {
        let mut choice = vec![0usize; n];
        loop {
            let r: Vec<f64> = (0..n).map(|i| fi.demands[i] * cost[i][open[choice[i]]]).collect();
            let nu = eval_closed_form(&fi.measure, &OutcomeVector::new(r.clone())?)?;
            let v = fi.gamma * r.iter().sum::<f64>() + (1.0 - fi.gamma) * scale * nu;
            if best.as_ref().is_none_or(|b| v < b.0) {
                best = Some((v, open.clone(), choice.iter().map(|&c| open[c]).collect()));
            }
            let mut d = 0;
            while d < n && choice[d] + 1 == fi.p {
                choice[d] = 0;
                d += 1;
            }
            if d == n {
                break;
            }
            choice[d] += 1;
        }
        // next combination of open sites
        let mut k = fi.p;
        while k > 0 && open[k - 1] == m - fi.p + k - 1 {
            k -= 1;
        }
        if k == 0 {
            break;
        }
        open[k - 1] += 1;
        for t in k..fi.p {
            open[t] = open[t - 1] + 1;
        }
    }
    let (value, open, assign) = best.ok_or(OracleError::Infeasible)?;
    let mut x = vec![0.0; m + n * m];
    for j in open {
        x[j] = 1.0;
    }
    for (i, j) in assign.into_iter().enumerate() {
        x[fi.y_index(i, j)] = 1.0;
    }
    Ok(LatticeOptimum { value, x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::MeasureKind;

    #[test]
    fn permutation_examples() {
        assert_eq!(permutation_sup(&[-1.0, 0.0, 1.0], &[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(permutation_sup(&[-8.0, -4.0, 0.0, 4.0, 8.0], &[1.0, 2.0, 2.5, 2.5, 4.5]).unwrap(), 30.0);
        assert_eq!(permutation_sup(&[-1.0, 0.5, 0.5], &[4.0; 3]).unwrap(), 0.0);
        assert!(matches!(permutation_sup(&[0.0; 9], &[0.0; 9]), Err(OracleError::TooLarge(_))));
    }

    #[test]
    fn permutation_visits_all() {
        // only one of 5! orders attains the maximum
        let w = [1.0, 10.0, 100.0, 1000.0, 10000.0];
        let u = [5.0, 1.0, 4.0, 2.0, 3.0];
        assert_eq!(permutation_sup(&w, &u).unwrap(), 54321.0);
    }

    #[test]
    fn sampled_ball_support() {
        let mad = DualSet::norm_ball(5, BallNorm::Inf, 1.0).unwrap();
        let v = sampled_support(&mad, &[1.0, 2.0, 2.5, 2.5, 4.5], 1_000_000, 1).unwrap();
        assert!((4.0 - 0.05..=4.0 + 1e-12).contains(&v), "{v}");
        let sd = DualSet::norm_ball(4, BallNorm::L2, 1.0).unwrap();
        let v = sampled_support(&sd, &[0.0, 3.0, 0.0, 1.0], 1_000_000, 2).unwrap();
        assert!((v - 6f64.sqrt()).abs() < 0.05, "{v}");
        assert_eq!(sampled_support(&mad, &[2.0; 5], 1000, 3).unwrap(), 0.0);
    }

    #[test]
    fn hausdorff_of_segments() {
        let p = vec![vec![0.0, 0.0], vec![-1.0, 1.0]];
        let q = vec![vec![0.0, 0.0], vec![-2.0, 2.0]];
        let d = sampled_hausdorff(&p, &q, 1000, 4).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn lattice_infeasible_and_grid() {
        let mut p = crate::models::build_ra(&crate::models::AllocationInstance {
            a: vec![1.0, 2.0],
            budget: 1.0,
            cap: None,
            budget_equality: false,
            gamma: 0.0,
            measure: MeasureKind::Range,
            seed: None,
        })
        .unwrap();
        let spec = LatticeSpec::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![0.25, 0.25]).unwrap();
        let best = lattice_solve(&p, &spec).unwrap();
        assert_eq!(best.value, -2.0);
        p.rows[0].rhs = -1.0;
        assert_eq!(lattice_solve(&p, &spec).unwrap_err(), OracleError::Infeasible);
        assert!(LatticeSpec::new(vec![0.0; 8], vec![100.0; 8], vec![1.0; 8]).is_err());
    }
}
