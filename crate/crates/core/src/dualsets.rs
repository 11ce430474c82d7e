//! Dual sets of convex fairness measures.
//!
//! A convex fairness measure is the support function of a compact set of
//! ascending zero-sum weights, evaluated at the sorted outcome vector.
//! Three representations cover every built-in measure: a single weight
//! vector, an explicit vertex list, and the centering image of an
//! ascending `q`-norm ball.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::{
    gini_weights, rawlsian_weights, sorted, sorted_dot, MeasureError, MeasureKind, OutcomeVector,
    WeightVector,
};

/// Membership tolerance for the ascending zero-sum cone.
pub const CONE_TOL: f64 = 1e-9;
/// Vertex deduplication tolerance.
pub const DEDUP_TOL: f64 = 1e-9;
/// Matching tolerance used by [`check_equivalent`].
pub const MATCH_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualSetError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("need at least two subjects, got {0}")]
    TooFewSubjects(usize),
    #[error("q=2 ball in dimension {0} is not a polytope")]
    NotPolytope(usize),
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("vertex {0} is not ascending and zero-sum")]
    OutsideCone(usize),
    #[error("dual set contains no nonzero weight")]
    ZeroSet,
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Norm index of a centered ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallNorm {
    L1,
    L2,
    Inf,
}

impl Serialize for BallNorm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            BallNorm::L1 => s.serialize_u64(1),
            BallNorm::L2 => s.serialize_u64(2),
            BallNorm::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for BallNorm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Q {
            Int(u64),
            Text(String),
        }
        match Q::deserialize(d)? {
            Q::Int(1) => Ok(BallNorm::L1),
            Q::Int(2) => Ok(BallNorm::L2),
            Q::Text(t) if t == "inf" => Ok(BallNorm::Inf),
            Q::Text(t) if t == "1" => Ok(BallNorm::L1),
            Q::Text(t) if t == "2" => Ok(BallNorm::L2),
            _ => Err(serde::de::Error::custom("q must be 1, 2 or \"inf\"")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Repr", into = "Repr")]
pub enum DualSet {
    Singleton(WeightVector),
    Vertices { n: usize, v: Vec<Vec<f64>> },
    NormBall { n: usize, q: BallNorm, radius: f64 },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
enum Repr {
    Singleton {
        w: WeightVector,
    },
    Vertices {
        #[serde(rename = "V")]
        v: Vec<Vec<f64>>,
    },
    NormBall {
        q: BallNorm,
        radius: f64,
        n: usize,
    },
}

impl TryFrom<Repr> for DualSet {
    type Error = DualSetError;
    fn try_from(r: Repr) -> Result<Self, Self::Error> {
        match r {
            Repr::Singleton { w } => Ok(DualSet::Singleton(w)),
            Repr::Vertices { v } => DualSet::vertices(v),
            Repr::NormBall { q, radius, n } => DualSet::norm_ball(n, q, radius),
        }
    }
}

impl From<DualSet> for Repr {
    fn from(d: DualSet) -> Self {
        match d {
            DualSet::Singleton(w) => Repr::Singleton { w },
            DualSet::Vertices { v, .. } => Repr::Vertices { v },
            DualSet::NormBall { n, q, radius } => Repr::NormBall { q, radius, n },
        }
    }
}

fn in_cone(w: &[f64]) -> bool {
    let scale = w.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    w.windows(2).all(|p| p[1] >= p[0] - CONE_TOL * scale)
        && w.iter().sum::<f64>().abs() <= CONE_TOL * scale
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn is_zero(v: &[f64]) -> bool {
    v.iter().all(|x| x.abs() <= DEDUP_TOL)
}

fn centered(mut v: Vec<f64>) -> Vec<f64> {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= m);
    v
}

fn push_unique(list: &mut Vec<Vec<f64>>, v: Vec<f64>) {
    if !list.iter().any(|u| dist2(u, &v) <= DEDUP_TOL) {
        list.push(v);
    }
}

impl DualSet {
    pub fn singleton(w: WeightVector) -> DualSet {
        DualSet::Singleton(w)
    }

    /// Explicit vertex list; every vector must be ascending and zero-sum.
    pub fn vertices(v: Vec<Vec<f64>>) -> Result<DualSet, DualSetError> {
        let n = v.first().map(|x| x.len()).ok_or(DualSetError::ZeroSet)?;
        if n < 2 {
            return Err(DualSetError::TooFewSubjects(n));
        }
        for (i, x) in v.iter().enumerate() {
            if x.len() != n {
                return Err(DualSetError::DimensionMismatch { expected: n, got: x.len() });
            }
            if !x.iter().all(|e| e.is_finite()) || !in_cone(x) {
                return Err(DualSetError::OutsideCone(i));
            }
        }
        if v.iter().all(|x| is_zero(x)) {
            return Err(DualSetError::ZeroSet);
        }
        Ok(DualSet::Vertices { n, v })
    }

    pub fn norm_ball(n: usize, q: BallNorm, radius: f64) -> Result<DualSet, DualSetError> {
        if n < 2 {
            return Err(DualSetError::TooFewSubjects(n));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(DualSetError::InvalidRadius(radius));
        }
        Ok(DualSet::NormBall { n, q, radius })
    }

    pub fn dim(&self) -> usize {
        match self {
            DualSet::Singleton(w) => w.len(),
            DualSet::Vertices { n, .. } | DualSet::NormBall { n, .. } => *n,
        }
    }

    /// `β·W` for `β > 0`.
    pub fn scaled(&self, beta: f64) -> DualSet {
        assert!(beta > 0.0 && beta.is_finite(), "scale must be positive");
        match self {
            DualSet::Singleton(w) => DualSet::Singleton(w.scaled(beta)),
            DualSet::Vertices { n, v } => DualSet::Vertices {
                n: *n,
                v: v.iter().map(|x| x.iter().map(|e| e * beta).collect()).collect(),
            },
            DualSet::NormBall { n, q, radius } => DualSet::NormBall {
                n: *n,
                q: *q,
                radius: radius * beta,
            },
        }
    }

    /// Largest last-coordinate weight, the value of the measure at `e_N`.
    pub fn wmax(&self) -> f64 {
        let n = self.dim();
        let mut e = vec![0.0; n];
        e[n - 1] = 1.0;
        self.support_sorted(&e).0
    }

    /// The set divided by [`DualSet::wmax`].
    pub fn normalized(&self) -> DualSet {
        self.scaled(1.0 / self.wmax())
    }

    pub fn is_polytope(&self) -> bool {
        !matches!(self, DualSet::NormBall { n, q: BallNorm::L2, .. } if *n > 2)
    }

    /// Support value at an already ascending vector.
    pub(crate) fn support_sorted(&self, s: &[f64]) -> (f64, Vec<f64>) {
        match self {
            DualSet::Singleton(w) => (sorted_dot(w.as_slice(), s), w.as_slice().to_vec()),
            DualSet::Vertices { n, v } => {
                let mut best: Option<(f64, &Vec<f64>)> = None;
                for x in v.iter().filter(|x| !is_zero(x)) {
                    let val = sorted_dot(x, s);
                    if best.is_none_or(|(b, _)| val > b) {
                        best = Some((val, x));
                    }
                }
                match best {
                    Some((val, x)) => (val, x.clone()),
                    None => (0.0, vec![0.0; *n]),
                }
            }
            DualSet::NormBall { n, q, radius } => {
                let c = centered(s.to_vec());
                let r = *radius;
                let wp: Vec<f64> = match q {
                    BallNorm::Inf => c
                        .iter()
                        .map(|&x| if x > 0.0 { r } else if x < 0.0 { -r } else { 0.0 })
                        .collect(),
                    BallNorm::L2 => {
                        let nc = norm2(&c);
                        if nc == 0.0 {
                            vec![0.0; *n]
                        } else {
                            c.iter().map(|x| r * x / nc).collect()
                        }
                    }
                    BallNorm::L1 => {
                        let mut w = vec![0.0; *n];
                        let (lo, hi) = (c[0], c[n - 1]);
                        if hi > 0.0 && hi >= -lo {
                            w[n - 1] = r;
                        } else if lo < 0.0 {
                            w[0] = -r;
                        }
                        w
                    }
                };
                let w = centered(wp);
                (sorted_dot(&w, s), w)
            }
        }
    }

    /// Whether `w` lies in the set, up to `tol`.
    pub fn contains(&self, w: &[f64], tol: f64) -> bool {
        if w.len() != self.dim() || !in_cone(w) {
            return false;
        }
        match self {
            DualSet::Singleton(x) => dist2(x.as_slice(), w) <= tol,
            DualSet::Vertices { v, .. } => distance_to_hull(w, v) <= tol,
            DualSet::NormBall { q, radius, .. } => {
                let gauge = match q {
                    BallNorm::L2 => norm2(w),
                    BallNorm::Inf => {
                        let (lo, hi) = (w[0], w[w.len() - 1]);
                        (hi - lo) / 2.0
                    }
                    BallNorm::L1 => {
                        let s = sorted(w);
                        let med = s[s.len() / 2];
                        s.iter().map(|x| (x - med).abs()).sum()
                    }
                };
                gauge <= radius + tol
            }
        }
    }
}

/// Canonical dual set of a built-in measure.
///
/// `Envy(c)` maps to the Gini singleton scaled by `c/2`.
pub fn dual_set_of(kind: &MeasureKind, n: usize) -> Result<DualSet, DualSetError> {
    if n < 2 {
        return Err(DualSetError::TooFewSubjects(n));
    }
    let single = |w: Vec<f64>| -> Result<DualSet, DualSetError> {
        Ok(DualSet::Singleton(WeightVector::new(w)?))
    };
    match kind {
        MeasureKind::Range | MeasureKind::MaxPairwiseDeviation => {
            let mut w = vec![0.0; n];
            w[0] = -1.0;
            w[n - 1] = 1.0;
            single(w)
        }
        MeasureKind::GiniDeviation => single(gini_weights(n)),
        MeasureKind::Mad => DualSet::norm_ball(n, BallNorm::Inf, 1.0),
        MeasureKind::StdDev => DualSet::norm_ball(n, BallNorm::L2, 1.0),
        MeasureKind::MaxMad => DualSet::norm_ball(n, BallNorm::L1, 1.0),
        MeasureKind::MaxSumPairwiseDeviation => DualSet::norm_ball(n, BallNorm::L1, n as f64),
        MeasureKind::SumMaxPairwiseDeviation => {
            let v = (1..n)
                .map(|k| {
                    let mut w = vec![1.0; n];
                    w[0] = -((n - k) as f64) - 1.0;
                    w[1..k].iter_mut().for_each(|x| *x = -1.0);
                    w[n - 1] = (k + 1) as f64;
                    w
                })
                .collect();
            DualSet::vertices(v)
        }
        MeasureKind::OrderBased(w) => {
            if w.len() != n {
                return Err(DualSetError::DimensionMismatch { expected: w.len(), got: n });
            }
            Ok(DualSet::Singleton(w.clone()))
        }
        MeasureKind::RawlsianGap => single(rawlsian_weights(n)),
        MeasureKind::Envy { c } => single(gini_weights(n).into_iter().map(|x| x * c / 2.0).collect()),
    }
}

/// `(ν(u), w*)` with `w*` an ascending maximizer over the set.
pub fn support_value(ds: &DualSet, u: &OutcomeVector) -> Result<(f64, Vec<f64>), DualSetError> {
    if u.len() != ds.dim() {
        return Err(DualSetError::DimensionMismatch { expected: ds.dim(), got: u.len() });
    }
    Ok(ds.support_sorted(&sorted(u.as_slice())))
}

/// Extreme points of a polytope dual set.
///
/// Ball sets always list the zero vector, which is extreme because the
/// ascending zero-sum cone is pointed.
pub fn vertices(ds: &DualSet) -> Result<Vec<Vec<f64>>, DualSetError> {
    match ds {
        DualSet::Singleton(w) => Ok(vec![w.as_slice().to_vec()]),
        DualSet::Vertices { v, .. } => Ok(prune(v)),
        DualSet::NormBall { n, q, radius } => ball_vertices(*n, *q, *radius),
    }
}

fn ball_vertices(n: usize, q: BallNorm, r: f64) -> Result<Vec<Vec<f64>>, DualSetError> {
    let mut out = vec![vec![0.0; n]];
    match q {
        BallNorm::Inf => {
            for k in 1..n {
                let w = (0..n).map(|i| if i < k { -r } else { r }).collect();
                push_unique(&mut out, centered(w));
            }
        }
        BallNorm::L1 => {
            for k in 1..=n / 2 {
                let w = (0..n).map(|i| if i < k { -r / k as f64 } else { 0.0 }).collect();
                push_unique(&mut out, centered(w));
            }
            for k in n.div_ceil(2)..n {
                let m = (n - k) as f64;
                let w = (0..n).map(|i| if i >= k { r / m } else { 0.0 }).collect();
                push_unique(&mut out, centered(w));
            }
        }
        BallNorm::L2 if n == 2 => {
            let t = r / 2f64.sqrt();
            out.push(vec![-t, t]);
        }
        BallNorm::L2 => return Err(DualSetError::NotPolytope(n)),
    }
    Ok(out)
}

fn prune(v: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut keep: Vec<Vec<f64>> = Vec::new();
    for x in v {
        push_unique(&mut keep, x.clone());
    }
    let mut i = 0;
    while i < keep.len() && keep.len() > 1 {
        let others: Vec<Vec<f64>> =
            keep.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| x.clone()).collect();
        let scale = 1.0 + norm2(&keep[i]);
        if distance_to_hull(&keep[i], &others) <= DEDUP_TOL * scale {
            keep.remove(i);
        } else {
            i += 1;
        }
    }
    keep
}

/// Nonzero extreme points of `conv(W ∪ {0})`.
fn cone_vertices(ds: &DualSet) -> Result<Vec<Vec<f64>>, DualSetError> {
    let mut v = vertices(ds)?;
    v.push(vec![0.0; ds.dim()]);
    Ok(prune(&v).into_iter().filter(|x| !is_zero(x)).collect())
}

/// `β > 0` with `ν₁ = β·ν₂`, or `None` when the measures are not
/// proportional.
///
/// Sets are compared as `conv(W ∪ {0})`, which leaves every support value
/// on the ascending cone unchanged. A curved `q=2` ball is only
/// proportional to another `q=2` ball.
pub fn check_equivalent(ds1: &DualSet, ds2: &DualSet) -> Result<Option<f64>, DualSetError> {
    if ds1.dim() != ds2.dim() {
        return Err(DualSetError::DimensionMismatch { expected: ds1.dim(), got: ds2.dim() });
    }
    match (ds1.is_polytope(), ds2.is_polytope()) {
        (false, false) => {
            let (DualSet::NormBall { radius: r1, .. }, DualSet::NormBall { radius: r2, .. }) =
                (ds1, ds2)
            else {
                unreachable!("only q=2 balls are curved")
            };
            return Ok(Some(r1 / r2));
        }
        (true, true) => {}
        _ => return Ok(None),
    }
    let v1 = cone_vertices(ds1)?;
    let v2 = cone_vertices(ds2)?;
    if v1.len() != v2.len() || v1.is_empty() {
        return Ok(None);
    }
    let biggest = |v: &[Vec<f64>]| v.iter().map(|x| norm2(x)).fold(0.0, f64::max);
    let beta = biggest(&v1) / biggest(&v2);
    let all_matched = v1.iter().all(|x| {
        let tol = MATCH_TOL * (1.0 + norm2(x));
        v2.iter().any(|y| {
            let scaled: Vec<f64> = y.iter().map(|e| e * beta).collect();
            dist2(x, &scaled) <= tol
        })
    });
    Ok(all_matched.then_some(beta))
}

/// Hausdorff distance between two polytope dual sets, taken over their
/// vertex lists as returned by [`vertices`].
pub fn hausdorff(ds1: &DualSet, ds2: &DualSet) -> Result<f64, DualSetError> {
    if ds1.dim() != ds2.dim() {
        return Err(DualSetError::DimensionMismatch { expected: ds1.dim(), got: ds2.dim() });
    }
    let a = vertices(ds1)?;
    let b = vertices(ds2)?;
    let directed = |from: &[Vec<f64>], to: &[Vec<f64>]| {
        from.iter().map(|x| distance_to_hull(x, to)).fold(0.0, f64::max)
    };
    Ok(directed(&a, &b).max(directed(&b, &a)))
}

/// Euclidean distance from `p` to `conv(hull)`.
pub fn distance_to_hull(p: &[f64], hull: &[Vec<f64>]) -> f64 {
    let (_, point) = project_to_hull(p, hull);
    dist2(p, &point)
}

/// Projection of `p` onto `conv(hull)` by Wolfe's minimum-norm-point
/// active-set method. Returns barycentric weights and the projected point.
pub fn project_to_hull(p: &[f64], hull: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    assert!(!hull.is_empty(), "empty hull");
    let pts: Vec<Vec<f64>> = hull.iter().map(|h| h.iter().zip(p).map(|(a, b)| a - b).collect()).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let scale = pts.iter().map(|x| dot(x, x)).fold(0.0, f64::max).max(1e-300);
    let combine = |set: &[usize], lam: &[f64]| {
        let mut x = vec![0.0; p.len()];
        for (&i, &l) in set.iter().zip(lam) {
            x.iter_mut().zip(&pts[i]).for_each(|(a, b)| *a += l * b);
        }
        x
    };

    let start = (0..pts.len())
        .min_by(|&i, &j| dot(&pts[i], &pts[i]).total_cmp(&dot(&pts[j], &pts[j])))
        .unwrap();
    let mut set = vec![start];
    let mut lam = vec![1.0];
    let mut x = pts[start].clone();

    for _ in 0..50 * (pts.len() + 1) {
        let xx = dot(&x, &x);
        let (j, xj) = (0..pts.len())
            .map(|j| (j, dot(&x, &pts[j])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if xx - xj <= 1e-12 * scale || set.contains(&j) {
            break;
        }
        set.push(j);
        lam.push(0.0);
        loop {
            let Some(alpha) = affine_minimizer(&set, &pts) else {
                set.pop();
                lam.pop();
                break;
            };
            if alpha.iter().all(|&a| a > 1e-12) {
                lam = alpha;
                break;
            }
            let mut theta = 1.0f64;
            for (l, a) in lam.iter().zip(&alpha) {
                if *a <= 1e-12 && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in lam.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            let before = set.len();
            let mut k = 0;
            while k < set.len() {
                if lam[k] <= 1e-12 {
                    set.remove(k);
                    lam.remove(k);
                } else {
                    k += 1;
                }
            }
            if set.len() == before {
                let k = (0..lam.len()).min_by(|&a, &b| lam[a].total_cmp(&lam[b])).unwrap();
                set.remove(k);
                lam.remove(k);
            }
            let s: f64 = lam.iter().sum();
            lam.iter_mut().for_each(|l| *l /= s);
        }
        let nx = combine(&set, &lam);
        if dot(&nx, &nx) > xx {
            break;
        }
        x = nx;
    }

    let mut weights = vec![0.0; hull.len()];
    for (&i, &l) in set.iter().zip(&lam) {
        weights[i] = l;
    }
    let point = x.iter().zip(p).map(|(a, b)| a + b).collect();
    (weights, point)
}

/// Minimizer of `‖Σ α_i p_i‖` over the affine hull of `set`.
fn affine_minimizer(set: &[usize], pts: &[Vec<f64>]) -> Option<Vec<f64>> {
    let k = set.len();
    let dim = k + 1;
    let mut a = vec![0.0; dim * (dim + 1)];
    let at = |r: usize, c: usize| r * (dim + 1) + c;
    for r in 0..k {
        for c in 0..k {
            a[at(r, c)] = pts[set[r]].iter().zip(&pts[set[c]]).map(|(x, y)| x * y).sum();
        }
        a[at(r, k)] = 1.0;
        a[at(k, r)] = 1.0;
    }
    a[at(k, dim)] = 1.0;
    let scale = (0..k).map(|r| a[at(r, r)]).fold(1e-300, f64::max);
    for col in 0..dim {
        let piv = (col..dim).max_by(|&x, &y| a[at(x, col)].abs().total_cmp(&a[at(y, col)].abs()))?;
        let limit = if col < k { 1e-13 * scale } else { 1e-13 };
        if a[at(piv, col)].abs() <= limit {
            return None;
        }
        if piv != col {
            for c in 0..=dim {
                a.swap(at(piv, c), at(col, c));
            }
        }
        for r in 0..dim {
            if r != col {
                let f = a[at(r, col)] / a[at(col, col)];
                if f != 0.0 {
                    for c in col..=dim {
                        a[at(r, c)] -= f * a[at(col, c)];
                    }
                }
            }
        }
    }
    Some((0..k).map(|r| a[at(r, dim)] / a[at(r, r)]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::eval_closed_form;
    use crate::solver::simplex::{LpData, LpStatus, Simplex};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ov(v: &[f64]) -> OutcomeVector {
        OutcomeVector::new(v.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        dist2(a, b) < 1e-12
    }

    #[test]
    fn canonical_sets() {
        let DualSet::Singleton(w) = dual_set_of(&MeasureKind::Range, 4).unwrap() else {
            panic!()
        };
        assert_eq!(w.as_slice(), &[-1.0, 0.0, 0.0, 1.0]);
        let ds = dual_set_of(&MeasureKind::SumMaxPairwiseDeviation, 4).unwrap();
        assert_eq!(
            vertices(&ds).unwrap(),
            vec![
                vec![-4.0, 1.0, 1.0, 2.0],
                vec![-3.0, -1.0, 1.0, 3.0],
                vec![-2.0, -1.0, -1.0, 4.0]
            ]
        );
        assert_eq!(
            dual_set_of(&MeasureKind::MaxSumPairwiseDeviation, 3).unwrap(),
            DualSet::NormBall { n: 3, q: BallNorm::L1, radius: 3.0 }
        );
    }

    #[test]
    fn support_examples() {
        let u = ov(&[1.0, 2.0, 2.5, 2.5, 4.5]);
        let mad = dual_set_of(&MeasureKind::Mad, 5).unwrap();
        assert!((support_value(&mad, &u).unwrap().0 - 4.0).abs() < 1e-14);
        let sd = dual_set_of(&MeasureKind::StdDev, 4).unwrap();
        let (v, w) = support_value(&sd, &ov(&[0.0, 3.0, 0.0, 1.0])).unwrap();
        assert!((v - 6f64.sqrt()).abs() < 1e-14);
        assert!(in_cone(&w));
        for k in MeasureKind::table() {
            let ds = dual_set_of(&k, 4).unwrap();
            assert_eq!(support_value(&ds, &ov(&[2.5; 4])).unwrap().0, 0.0);
        }
        assert!(matches!(
            support_value(&mad, &ov(&[1.0, 2.0])),
            Err(DualSetError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn support_matches_closed_form_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=8 {
            for _ in 0..200 {
                let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
                let u = ov(&u);
                for k in MeasureKind::table() {
                    let ds = dual_set_of(&k, n).unwrap();
                    let (v, w) = support_value(&ds, &u).unwrap();
                    let c = eval_closed_form(&k, &u).unwrap();
                    assert!((v - c).abs() <= 1e-9 * (1.0 + c.abs()), "{k:?} {v} {c}");
                    assert!(ds.contains(&w, 1e-9), "{k:?} argmax outside set");
                }
            }
        }
    }

    #[test]
    fn mad_ball_vertices_n3() {
        let ds = dual_set_of(&MeasureKind::Mad, 3).unwrap();
        let v = vertices(&ds).unwrap();
        assert_eq!(v.len(), 3);
        assert!(v.iter().any(|x| close(x, &[-4.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0])));
        assert!(v.iter().any(|x| close(x, &[-2.0 / 3.0, -2.0 / 3.0, 4.0 / 3.0])));
        assert!(v.iter().any(|x| is_zero(x)));
    }

    #[test]
    fn max_mad_vertices_n3() {
        let ds = dual_set_of(&MeasureKind::MaxMad, 3).unwrap();
        let v = vertices(&ds).unwrap();
        assert_eq!(v.len(), 3);
        assert!(v.iter().any(|x| close(x, &[-2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0])));
        assert!(v.iter().any(|x| close(x, &[-1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0])));
    }

    #[test]
    fn prune_drops_interior_points() {
        let ds = DualSet::vertices(vec![
            vec![-1.0, 0.0, 1.0],
            vec![-2.0, 1.0, 1.0],
            vec![-1.5, 0.5, 1.0],
            vec![-1.0, 0.0, 1.0],
        ])
        .unwrap();
        assert_eq!(vertices(&ds).unwrap().len(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            DualSet::vertices(vec![vec![1.0, -1.0]]).unwrap_err(),
            DualSetError::OutsideCone(0)
        );
        assert_eq!(DualSet::vertices(vec![vec![0.0, 0.0]]).unwrap_err(), DualSetError::ZeroSet);
        assert!(DualSet::norm_ball(3, BallNorm::L1, 0.0).is_err());
        let sd = dual_set_of(&MeasureKind::StdDev, 3).unwrap();
        assert_eq!(vertices(&sd).unwrap_err(), DualSetError::NotPolytope(3));
        assert_eq!(hausdorff(&sd, &sd).unwrap_err(), DualSetError::NotPolytope(3));
    }

    /// Maximizes `c·center(w')` over the ascending `q`-ball by LP.
    fn ball_lp_argmax(n: usize, q: BallNorm, r: f64, c: &[f64]) -> Vec<f64> {
        let cbar = c.iter().sum::<f64>() / n as f64;
        let mut d = LpData::default();
        // columns: w'_0..n-1, t_0..n-1 (|w'_i| <= t_i for q=1)
        for i in 0..n {
            d.cost.push(-(c[i] - cbar));
            let b = if q == BallNorm::Inf { r } else { f64::INFINITY };
            d.col_lb.push(-b);
            d.col_ub.push(b);
        }
        let mut row = 0;
        for i in 0..n - 1 {
            d.entries.push((row, i + 1, 1.0));
            d.entries.push((row, i, -1.0));
            d.row_lb.push(0.0);
            d.row_ub.push(f64::INFINITY);
            row += 1;
        }
        if q == BallNorm::L1 {
            let budget = row + 2 * n;
            for i in 0..n {
                d.cost.push(0.0);
                d.col_lb.push(0.0);
                d.col_ub.push(f64::INFINITY);
                for sgn in [1.0, -1.0] {
                    d.entries.push((row, n + i, 1.0));
                    d.entries.push((row, i, sgn));
                    d.row_lb.push(0.0);
                    d.row_ub.push(f64::INFINITY);
                    row += 1;
                }
                d.entries.push((budget, n + i, 1.0));
            }
            d.row_lb.push(f64::NEG_INFINITY);
            d.row_ub.push(r);
        }
        let mut s = Simplex::new(&d);
        assert_eq!(s.solve().unwrap(), LpStatus::Optimal);
        centered(s.primal()[..n].to_vec())
    }

    #[test]
    fn ball_vertices_certified_by_lp() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=6 {
            for q in [BallNorm::Inf, BallNorm::L1] {
                let r = 1.7;
                let v = ball_vertices(n, q, r).unwrap();
                let ds = DualSet::NormBall { n, q, radius: r };
                for (i, x) in v.iter().enumerate() {
                    assert!(ds.contains(x, 1e-12));
                    let others: Vec<Vec<f64>> =
                        v.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, y)| y.clone()).collect();
                    if !others.is_empty() {
                        assert!(distance_to_hull(x, &others) > 1e-6, "n={n} {q:?} {x:?} not extreme");
                    }
                }
                let mut hits = vec![false; v.len()];
                for _ in 0..400 {
                    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let w = ball_lp_argmax(n, q, r, &c);
                    let best = v.iter().map(|x| sorted_dot_any(x, &c)).fold(f64::MIN, f64::max);
                    assert!((sorted_dot_any(&w, &c) - best).abs() < 1e-7, "n={n} {q:?}");
                    if let Some(k) = v.iter().position(|x| dist2(x, &w) < 1e-7) {
                        hits[k] = true;
                    }
                }
                assert!(hits.iter().all(|&h| h), "n={n} {q:?} vertex never optimal: {hits:?}");
            }
        }
    }

    fn sorted_dot_any(w: &[f64], c: &[f64]) -> f64 {
        w.iter().zip(c).map(|(a, b)| a * b).sum()
    }

    #[test]
    fn equivalence_examples() {
        for n in 3..=8 {
            let r = dual_set_of(&MeasureKind::Range, n).unwrap();
            let p = dual_set_of(&MeasureKind::MaxPairwiseDeviation, n).unwrap();
            assert_eq!(check_equivalent(&r, &p).unwrap(), Some(1.0));
            let vii = dual_set_of(&MeasureKind::MaxSumPairwiseDeviation, n).unwrap();
            let vi = dual_set_of(&MeasureKind::MaxMad, n).unwrap();
            let beta = check_equivalent(&vii, &vi).unwrap().unwrap();
            assert!((beta - n as f64).abs() < 1e-12);
        }
        let mad = dual_set_of(&MeasureKind::Mad, 5).unwrap();
        let mm = dual_set_of(&MeasureKind::MaxMad, 5).unwrap();
        assert_eq!(check_equivalent(&mad, &mm).unwrap(), None);
    }

    #[test]
    fn projection_basics() {
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!((distance_to_hull(&[1.0, 1.0], &tri) - 0.5f64.sqrt()).abs() < 1e-14);
        assert!(distance_to_hull(&[0.2, 0.2], &tri) < 1e-15);
        assert!((distance_to_hull(&[-1.0, -1.0], &tri) - 2f64.sqrt()).abs() < 1e-14);
        assert!((distance_to_hull(&[2.0, -1.0], &tri) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn hausdorff_basics() {
        let a = DualSet::singleton(WeightVector::new(vec![-1.0, 0.0, 1.0]).unwrap());
        let b = DualSet::singleton(WeightVector::new(vec![-2.0, 1.0, 1.0]).unwrap());
        assert!((hausdorff(&a, &b).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        assert!(hausdorff(&a, &a).unwrap() < 1e-15);
    }

    #[test]
    fn json_shapes() {
        let ds = dual_set_of(&MeasureKind::Mad, 3).unwrap();
        let j = serde_json::to_string(&ds).unwrap();
        assert_eq!(j, r#"{"variant":"norm_ball","q":"inf","radius":1.0,"n":3}"#);
        assert_eq!(serde_json::from_str::<DualSet>(&j).unwrap(), ds);
        let ds = dual_set_of(&MeasureKind::SumMaxPairwiseDeviation, 3).unwrap();
        let j = serde_json::to_string(&ds).unwrap();
        assert!(j.starts_with(r#"{"variant":"vertices","V":[["#));
        assert_eq!(serde_json::from_str::<DualSet>(&j).unwrap(), ds);
        let j = r#"{"variant":"singleton","w":[-1.0,1.0]}"#;
        assert!(matches!(serde_json::from_str::<DualSet>(j).unwrap(), DualSet::Singleton(_)));
        let j = r#"{"variant":"norm_ball","q":1,"radius":2.0,"n":4}"#;
        assert_eq!(
            serde_json::from_str::<DualSet>(j).unwrap(),
            DualSet::NormBall { n: 4, q: BallNorm::L1, radius: 2.0 }
        );
    }
}
