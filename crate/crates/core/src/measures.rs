//! Deviation-based fairness measures over an outcome vector.
//!
//! An order-based measure weighs the sorted outcomes,
//! `ν_w(u) = Σ w_i u_(i)`, with ascending zero-sum weights. The eight
//! classical deviation measures, the Rawlsian gap and the affine envy
//! measure are evaluated here from their direct formulas; their dual-set
//! form lives in [`crate::dualsets`].

use std::fmt;
use std::str::FromStr;

use num_traits::{FromPrimitive, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance on weight ordering and zero-sum checks.
pub const WEIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("weights are not in nondecreasing order")]
    NotSorted,
    #[error("weights sum to {0}, expected 0")]
    NonZeroSum(f64),
    #[error("first weight must be negative and last weight positive")]
    SignCondition,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("need at least two subjects, got {0}")]
    TooFewSubjects(usize),
    #[error("entry {0} is not finite")]
    NonFinite(usize),
    #[error("relative measures are defined for nonnegative outcomes only")]
    NegativeOutcome,
    #[error("envy scale must be positive, got {0}")]
    InvalidEnvyScale(f64),
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
}

/// Impact vector `u`, one entry per subject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct OutcomeVector(Vec<f64>);

impl OutcomeVector {
    pub fn new(values: Vec<f64>) -> Result<Self, MeasureError> {
        if values.len() < 2 {
            return Err(MeasureError::TooFewSubjects(values.len()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(MeasureError::NonFinite(i));
        }
        Ok(OutcomeVector(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for OutcomeVector {
    type Error = MeasureError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        OutcomeVector::new(v)
    }
}

impl From<OutcomeVector> for Vec<f64> {
    fn from(u: OutcomeVector) -> Self {
        u.0
    }
}

impl AsRef<[f64]> for OutcomeVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Ascending, zero-sum weights with a negative head and positive tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

/// Checks membership in the order-based weight set and wraps the vector.
pub fn validate_weight(w: &[f64]) -> Result<WeightVector, MeasureError> {
    if let Some(i) = w.iter().position(|v| !v.is_finite()) {
        return Err(MeasureError::NonFinite(i));
    }
    if w.len() < 2 {
        return Err(MeasureError::TooFewSubjects(w.len()));
    }
    if w.windows(2).any(|p| p[1] < p[0] - WEIGHT_TOL) {
        return Err(MeasureError::NotSorted);
    }
    let sum: f64 = w.iter().sum();
    let scale = w.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if sum.abs() > WEIGHT_TOL * scale {
        return Err(MeasureError::NonZeroSum(sum));
    }
    if w[0] >= 0.0 || w[w.len() - 1] <= 0.0 {
        return Err(MeasureError::SignCondition);
    }
    Ok(WeightVector(w.to_vec()))
}

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self, MeasureError> {
        validate_weight(&w)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Gini-deviation weights `2(2i - 1 - n)`, i = 1..n.
    pub fn gini(n: usize) -> WeightVector {
        WeightVector(gini_weights(n))
    }

    pub fn scaled(&self, factor: f64) -> WeightVector {
        assert!(factor > 0.0, "weight scale must be positive");
        WeightVector(self.0.iter().map(|v| v * factor).collect())
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = MeasureError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        validate_weight(&v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

impl AsRef<[f64]> for WeightVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn gini_weights(n: usize) -> Vec<f64> {
    (1..=n).map(|i| 2.0 * (2.0 * i as f64 - 1.0 - n as f64)).collect()
}

pub(crate) fn rawlsian_weights(n: usize) -> Vec<f64> {
    let share = 1.0 / n as f64;
    let mut w = vec![share; n];
    w[0] = share - 1.0;
    w
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KindRepr", into = "KindRepr")]
pub enum MeasureKind {
    Range,
    GiniDeviation,
    MaxPairwiseDeviation,
    Mad,
    StdDev,
    MaxMad,
    MaxSumPairwiseDeviation,
    SumMaxPairwiseDeviation,
    OrderBased(WeightVector),
    RawlsianGap,
    Envy { c: f64 },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum KindRepr {
    Range,
    GiniDeviation,
    MaxPairwiseDeviation,
    Mad,
    StdDev,
    MaxMad,
    MaxSumPairwiseDeviation,
    SumMaxPairwiseDeviation,
    OrderBased { weights: WeightVector },
    RawlsianGap,
    Envy { c: f64 },
}

impl TryFrom<KindRepr> for MeasureKind {
    type Error = MeasureError;
    fn try_from(r: KindRepr) -> Result<Self, Self::Error> {
        Ok(match r {
            KindRepr::Range => MeasureKind::Range,
            KindRepr::GiniDeviation => MeasureKind::GiniDeviation,
            KindRepr::MaxPairwiseDeviation => MeasureKind::MaxPairwiseDeviation,
            KindRepr::Mad => MeasureKind::Mad,
            KindRepr::StdDev => MeasureKind::StdDev,
            KindRepr::MaxMad => MeasureKind::MaxMad,
            KindRepr::MaxSumPairwiseDeviation => MeasureKind::MaxSumPairwiseDeviation,
            KindRepr::SumMaxPairwiseDeviation => MeasureKind::SumMaxPairwiseDeviation,
            KindRepr::OrderBased { weights } => MeasureKind::OrderBased(weights),
            KindRepr::RawlsianGap => MeasureKind::RawlsianGap,
            KindRepr::Envy { c } => MeasureKind::envy(c)?,
        })
    }
}

impl From<MeasureKind> for KindRepr {
    fn from(k: MeasureKind) -> Self {
        match k {
            MeasureKind::Range => KindRepr::Range,
            MeasureKind::GiniDeviation => KindRepr::GiniDeviation,
            MeasureKind::MaxPairwiseDeviation => KindRepr::MaxPairwiseDeviation,
            MeasureKind::Mad => KindRepr::Mad,
            MeasureKind::StdDev => KindRepr::StdDev,
            MeasureKind::MaxMad => KindRepr::MaxMad,
            MeasureKind::MaxSumPairwiseDeviation => KindRepr::MaxSumPairwiseDeviation,
            MeasureKind::SumMaxPairwiseDeviation => KindRepr::SumMaxPairwiseDeviation,
            MeasureKind::OrderBased(weights) => KindRepr::OrderBased { weights },
            MeasureKind::RawlsianGap => KindRepr::RawlsianGap,
            MeasureKind::Envy { c } => KindRepr::Envy { c },
        }
    }
}

impl MeasureKind {
    pub fn envy(c: f64) -> Result<MeasureKind, MeasureError> {
        if c > 0.0 && c.is_finite() {
            Ok(MeasureKind::Envy { c })
        } else {
            Err(MeasureError::InvalidEnvyScale(c))
        }
    }

    /// The eight classical deviation measures in table order.
    pub fn table() -> [MeasureKind; 8] {
        [
            MeasureKind::Range,
            MeasureKind::GiniDeviation,
            MeasureKind::MaxPairwiseDeviation,
            MeasureKind::Mad,
            MeasureKind::StdDev,
            MeasureKind::MaxMad,
            MeasureKind::MaxSumPairwiseDeviation,
            MeasureKind::SumMaxPairwiseDeviation,
        ]
    }

    /// Roman-numeral index within [`MeasureKind::table`], if any.
    pub fn roman(&self) -> Option<&'static str> {
        Some(match self {
            MeasureKind::Range => "i",
            MeasureKind::GiniDeviation => "ii",
            MeasureKind::MaxPairwiseDeviation => "iii",
            MeasureKind::Mad => "iv",
            MeasureKind::StdDev => "v",
            MeasureKind::MaxMad => "vi",
            MeasureKind::MaxSumPairwiseDeviation => "vii",
            MeasureKind::SumMaxPairwiseDeviation => "viii",
            _ => return None,
        })
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            MeasureKind::Range => "Range",
            MeasureKind::GiniDeviation => "GD",
            MeasureKind::MaxPairwiseDeviation => "MaxPD",
            MeasureKind::Mad => "MAD",
            MeasureKind::StdDev => "StdDev",
            MeasureKind::MaxMad => "MaxMAD",
            MeasureKind::MaxSumPairwiseDeviation => "MaxSumPD",
            MeasureKind::SumMaxPairwiseDeviation => "SMaxPD",
            MeasureKind::OrderBased(_) => "OrderBased",
            MeasureKind::RawlsianGap => "Rawlsian",
            MeasureKind::Envy { .. } => "Envy",
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            MeasureKind::Range => "range",
            MeasureKind::GiniDeviation => "gini_deviation",
            MeasureKind::MaxPairwiseDeviation => "max_pairwise_deviation",
            MeasureKind::Mad => "mad",
            MeasureKind::StdDev => "std_dev",
            MeasureKind::MaxMad => "max_mad",
            MeasureKind::MaxSumPairwiseDeviation => "max_sum_pairwise_deviation",
            MeasureKind::SumMaxPairwiseDeviation => "sum_max_pairwise_deviation",
            MeasureKind::OrderBased(_) => "order_based",
            MeasureKind::RawlsianGap => "rawlsian_gap",
            MeasureKind::Envy { .. } => "envy",
        }
    }

    /// Required dimension, when the kind fixes one.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            MeasureKind::OrderBased(w) => Some(w.len()),
            _ => None,
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureKind::OrderBased(w) => {
                write!(f, "order_based:[")?;
                for (i, v) in w.as_slice().iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            MeasureKind::Envy { c } => write!(f, "envy:{c}"),
            other => f.write_str(other.tag()),
        }
    }
}

impl FromStr for MeasureKind {
    type Err = MeasureError;

    /// Accepts the JSON tag names, a few short aliases, `order_based:[..]`
    /// and `envy:<c>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("order_based:") {
            let weights: Vec<f64> = serde_json::from_str(rest)
                .map_err(|_| MeasureError::UnknownMeasure(s.to_string()))?;
            return Ok(MeasureKind::OrderBased(validate_weight(&weights)?));
        }
        if let Some(rest) = s.strip_prefix("envy:") {
            let c: f64 = rest
                .trim()
                .parse()
                .map_err(|_| MeasureError::UnknownMeasure(s.to_string()))?;
            return MeasureKind::envy(c);
        }
        Ok(match s.to_ascii_lowercase().as_str() {
            "range" | "i" => MeasureKind::Range,
            "gini_deviation" | "gini" | "gd" | "ii" => MeasureKind::GiniDeviation,
            "max_pairwise_deviation" | "max_pairwise" | "maxpd" | "iii" => {
                MeasureKind::MaxPairwiseDeviation
            }
            "mad" | "iv" => MeasureKind::Mad,
            "std_dev" | "stddev" | "std" | "v" => MeasureKind::StdDev,
            "max_mad" | "maxmad" | "vi" => MeasureKind::MaxMad,
            "max_sum_pairwise_deviation" | "max_sum_pairwise" | "maxsumpd" | "vii" => {
                MeasureKind::MaxSumPairwiseDeviation
            }
            "sum_max_pairwise_deviation" | "sum_max_pairwise" | "smaxpd" | "viii" => {
                MeasureKind::SumMaxPairwiseDeviation
            }
            "rawlsian_gap" | "rawlsian" => MeasureKind::RawlsianGap,
            "envy" => MeasureKind::Envy { c: 1.0 },
            _ => return Err(MeasureError::UnknownMeasure(s.to_string())),
        })
    }
}

pub(crate) fn sorted(u: &[f64]) -> Vec<f64> {
    let mut s = u.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// `Σ w_i u_(i)` with `u` sorted ascending.
pub fn eval_order_based(w: &WeightVector, u: &OutcomeVector) -> Result<f64, MeasureError> {
    check_dim(w.len(), u.len())?;
    Ok(order_value(w.as_slice(), u.as_slice()))
}

pub(crate) fn order_value(w: &[f64], u: &[f64]) -> f64 {
    sorted_dot(w, &sorted(u))
}

/// Telescoped `Σ_j (Σ_{i≥j} w_i)(u_(j) − u_(j−1))`; equals `Σ w_i u_(i)`
/// for zero-sum ascending `w`, is exactly 0 on constant `u` and never
/// negative.
pub(crate) fn sorted_dot(w: &[f64], sorted_u: &[f64]) -> f64 {
    let mut tail = 0.0;
    let mut total = 0.0;
    for j in (1..w.len()).rev() {
        tail += w[j];
        total += tail.max(0.0) * (sorted_u[j] - sorted_u[j - 1]);
    }
    total
}

fn check_dim(expected: usize, got: usize) -> Result<(), MeasureError> {
    if expected != got {
        Err(MeasureError::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

/// Direct formula for `kind` at `u`.
pub fn eval_closed_form(kind: &MeasureKind, u: &OutcomeVector) -> Result<f64, MeasureError> {
    if let Some(n) = kind.fixed_dim() {
        check_dim(n, u.len())?;
    }
    Ok(closed_form(kind, u.as_slice()))
}

pub(crate) fn closed_form(kind: &MeasureKind, u: &[f64]) -> f64 {
    let s = sorted(u);
    let u = s.as_slice();
    match kind {
        MeasureKind::StdDev => exact::squared_deviation(u).sqrt(),
        MeasureKind::OrderBased(w) => order_value(w.as_slice(), u),
        MeasureKind::Envy { c } => c * exact::pairwise_upward_sum(u),
        other => exact::closed_form(other, u).expect("kind has an exact form"),
    }
}

/// `ν(u) / (w_max · Σu)`, with `0/0 = 0`.
pub fn eval_relative(kind: &MeasureKind, u: &OutcomeVector) -> Result<f64, MeasureError> {
    if u.as_slice().iter().any(|&v| v < 0.0) {
        return Err(MeasureError::NegativeOutcome);
    }
    let value = eval_closed_form(kind, u)?;
    let total: f64 = u.as_slice().iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(value / (measure_wmax(kind, u.len()) * total))
}

/// `ν(0, …, 0, 1)`: the largest positive weight over the dual set.
///
/// For `OrderBased` the weight vector's own length is used.
pub fn measure_wmax(kind: &MeasureKind, n: usize) -> f64 {
    let n = kind.fixed_dim().unwrap_or(n);
    assert!(n >= 2, "need at least two subjects");
    let mut e = vec![0.0; n];
    e[n - 1] = 1.0;
    closed_form(kind, &e)
}

/// Measure formulas over any signed ordered field.
///
/// Running them over exact rationals reproduces tabulated values without
/// rounding. Standard deviation is exposed through its square.
pub mod exact {
    use super::*;

    /// `ū − min u`, summed as offsets from the minimum so constant
    /// vectors give exactly zero.
    fn mean_excess<T: Signed + Copy + PartialOrd + FromPrimitive>(u: &[T]) -> T {
        let n = T::from_usize(u.len()).expect("length fits");
        let lo = minv(u.iter().copied());
        u.iter().fold(T::zero(), |a, &b| a + (b - lo)) / n
    }

    fn mean<T: Signed + Copy + PartialOrd + FromPrimitive>(u: &[T]) -> T {
        minv(u.iter().copied()) + mean_excess(u)
    }

    fn maxv<T: PartialOrd + Copy>(it: impl Iterator<Item = T>) -> T {
        it.reduce(|a, b| if b > a { b } else { a }).expect("nonempty")
    }

    fn minv<T: PartialOrd + Copy>(it: impl Iterator<Item = T>) -> T {
        it.reduce(|a, b| if b < a { b } else { a }).expect("nonempty")
    }

    /// `Σ_i (u_i - ū)^2`.
    pub fn squared_deviation<T: Signed + Copy + PartialOrd + FromPrimitive>(u: &[T]) -> T {
        let m = mean(u);
        u.iter().fold(T::zero(), |a, &v| a + (v - m) * (v - m))
    }

    /// `Σ_{i<j} |u_j - u_i|`.
    pub fn pairwise_upward_sum<T: Signed + Copy>(u: &[T]) -> T {
        let mut s = T::zero();
        for i in 0..u.len() {
            for j in i + 1..u.len() {
                s = s + (u[j] - u[i]).abs();
            }
        }
        s
    }

    /// `Σ w_i u_(i)`.
    pub fn order_based<T: Signed + Copy + PartialOrd>(w: &[T], u: &[T]) -> T {
        let mut s = u.to_vec();
        s.sort_by(|a, b| a.partial_cmp(b).expect("comparable"));
        w.iter().zip(&s).fold(T::zero(), |a, (&x, &y)| a + x * y)
    }

    /// Direct formula for every kind except `StdDev`, `OrderBased` and
    /// `Envy`, which carry irrational or external parameters.
    pub fn closed_form<T>(kind: &MeasureKind, u: &[T]) -> Option<T>
    where
        T: Signed + Copy + PartialOrd + FromPrimitive,
    {
        let n = u.len();
        let abs_diff = |i: usize, j: usize| (u[i] - u[j]).abs();
        Some(match kind {
            MeasureKind::Range => maxv(u.iter().copied()) - minv(u.iter().copied()),
            MeasureKind::GiniDeviation => {
                let mut s = T::zero();
                for i in 0..n {
                    for j in 0..n {
                        s = s + abs_diff(i, j);
                    }
                }
                s
            }
            MeasureKind::MaxPairwiseDeviation => {
                maxv((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| abs_diff(i, j)))
            }
            MeasureKind::Mad => {
                let m = mean(u);
                u.iter().fold(T::zero(), |a, &v| a + (v - m).abs())
            }
            MeasureKind::MaxMad => {
                let m = mean(u);
                maxv(u.iter().map(|&v| (v - m).abs()))
            }
            MeasureKind::MaxSumPairwiseDeviation => maxv(
                (0..n).map(|i| (0..n).fold(T::zero(), |a, j| a + abs_diff(i, j))),
            ),
            MeasureKind::SumMaxPairwiseDeviation => (0..n)
                .map(|i| maxv((0..n).map(|j| abs_diff(i, j))))
                .fold(T::zero(), |a, b| a + b),
            MeasureKind::RawlsianGap => mean_excess(u),
            MeasureKind::StdDev | MeasureKind::OrderBased(_) | MeasureKind::Envy { .. } => {
                return None
            }
        })
    }
}
