#![allow(dead_code)]

use fairopt::measures::{eval_closed_form, MeasureKind, OutcomeVector, WeightVector};
use num_rational::Ratio;
use rand::Rng;

pub type Q = Ratio<i64>;

pub fn q(n: i64, d: i64) -> Q {
    Ratio::new(n, d)
}

pub fn qi(n: i64) -> Q {
    Ratio::from_integer(n)
}

/// A listed table value.
#[derive(Debug, Clone, Copy)]
pub enum Entry {
    Rational(Q),
    /// `√r`.
    Sqrt(Q),
    Irrational(f64),
}

impl Entry {
    pub fn as_f64(self) -> f64 {
        match self {
            Entry::Rational(r) => to_f64(r),
            Entry::Sqrt(r) => to_f64(r).sqrt(),
            Entry::Irrational(v) => v,
        }
    }
}

pub fn to_f64(r: Q) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// One non-equivalence example instantiated at a given `N`.
pub struct Witness {
    pub label: &'static str,
    pub n: usize,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    /// Exact coordinates when rational.
    pub exact1: Option<Vec<Q>>,
    pub exact2: Option<Vec<Q>>,
    pub values: Vec<(MeasureKind, Entry, Entry)>,
}

fn fill(head: &[Q], mid: Q, tail: &[Q], n: usize) -> Vec<Q> {
    let mut v = head.to_vec();
    v.extend(std::iter::repeat_n(mid, n - head.len() - tail.len()));
    v.extend_from_slice(tail);
    v
}

fn floats(v: &[Q]) -> Vec<f64> {
    v.iter().map(|r| to_f64(*r)).collect()
}

fn rational_row(label: &'static str, n: usize, u1: Vec<Q>, u2: Vec<Q>, values: Vec<(MeasureKind, Entry, Entry)>) -> Witness {
    Witness { label, n, u1: floats(&u1), u2: floats(&u2), exact1: Some(u1), exact2: Some(u2), values }
}

/// Rows A, B, B′ (at N=5 only), C, D and E at dimension `n ≥ 4`.
pub fn witness_table(n: usize) -> Vec<Witness> {
    use Entry::*;
    use MeasureKind::*;
    let k = (n - 3) as i64;
    let m = n as i64;
    let r = |v: Q| Rational(v);
    let mut rows = vec![
        rational_row(
            "A",
            n,
            fill(&[qi(1), qi(2)], q(5, 2), &[q(9, 2)], n),
            fill(&[qi(1), qi(1)], qi(2), &[qi(4)], n),
            vec![
                (Range, r(q(7, 2)), r(qi(3))),
                (GiniDeviation, r(qi(14 + 8 * k)), r(qi(12 + 8 * k))),
                (Mad, r(qi(4)), r(qi(4))),
                (StdDev, Sqrt(q(13, 2)), Sqrt(qi(6))),
                (MaxMad, r(qi(2)), r(qi(2))),
                (SumMaxPairwiseDeviation, r(q(19, 2) + qi(2 * k)), r(qi(9 + 2 * k))),
            ],
        ),
        rational_row(
            "B",
            n,
            fill(&[qi(2)], qi(5), &[qi(9)], n),
            fill(&[qi(2), qi(2)], qi(4), &[qi(8)], n),
            vec![
                (Range, r(qi(7)), r(qi(6))),
                (GiniDeviation, r(qi(28 + 14 * k)), r(qi(24 + 16 * k))),
                (StdDev, Sqrt(qi(25) - q(1, m)), Sqrt(qi(24))),
                (SumMaxPairwiseDeviation, r(qi(18 + 4 * k)), r(qi(18 + 4 * k))),
            ],
        ),
    ];
    if n == 5 {
        rows.push(rational_row(
            "B'",
            5,
            vec![qi(2), qi(5), qi(5), qi(6), qi(9)],
            vec![qi(2), qi(2), qi(4), qi(4), qi(8)],
            vec![
                (GiniDeviation, r(qi(60)), r(qi(56))),
                (SumMaxPairwiseDeviation, r(qi(26)), r(qi(26))),
            ],
        ));
    }
    rows.push(rational_row(
        "C",
        n,
        fill(&[qi(2), qi(5)], q(16, 3), &[qi(9)], n),
        fill(&[qi(2), qi(2)], q(13, 3), &[qi(9)], n),
        vec![
            (Range, r(qi(7)), r(qi(7))),
            (GiniDeviation, r(qi(28) + q(44, 3) * qi(k)), r(qi(28) + q(56, 3) * qi(k))),
            (StdDev, Sqrt(q(74, 3)), Sqrt(q(98, 3))),
        ],
    ));
    let s21 = 21f64.sqrt();
    let mut d2 = vec![3.0, 3.0];
    d2.extend(std::iter::repeat_n(3.0 + s21 / 3.0, n - 3));
    d2.push(3.0 + s21);
    let d1 = fill(&[qi(1), qi(2)], qi(3), &[qi(6)], n);
    rows.push(Witness {
        label: "D",
        n,
        u1: floats(&d1),
        u2: d2,
        exact1: Some(d1),
        exact2: None,
        values: vec![
            (GiniDeviation, r(qi(20 + 12 * k)), Irrational(4.0 * s21 + 8.0 * s21 / 3.0 * k as f64)),
            (StdDev, Sqrt(qi(14)), Irrational(14f64.sqrt())),
        ],
    });
    rows.push(rational_row(
        "E",
        n,
        fill(&[qi(1)], qi(7), &[qi(8), qi(12)], n),
        fill(&[qi(5), qi(10)], q(21, 2), &[qi(13), qi(14)], n),
        vec![(Mad, r(qi(12)), r(qi(12))), (MaxMad, r(qi(6)), r(q(11, 2)))],
    ));
    rows
}

/// Rows at the dimension each is stated for: E at N=6, the rest at N=5.
pub fn witness_table_stated() -> Vec<Witness> {
    let mut rows: Vec<Witness> = witness_table(5).into_iter().filter(|w| w.label != "E").collect();
    rows.extend(witness_table(6).into_iter().filter(|w| w.label == "E"));
    rows
}

pub fn eval(kind: &MeasureKind, u: &[f64]) -> f64 {
    eval_closed_form(kind, &OutcomeVector::new(u.to_vec()).unwrap()).unwrap()
}

/// A row certifies that `a` and `b` differ when one measure ties across
/// the pair and the other does not.
pub fn certifies(row: &Witness, a: &MeasureKind, b: &MeasureKind) -> bool {
    let tie = |k: &MeasureKind| {
        let (x, y) = (eval(k, &row.u1), eval(k, &row.u2));
        (x - y).abs() <= 1e-9 * (1.0 + x.abs())
    };
    let split = |k: &MeasureKind| {
        let (x, y) = (eval(k, &row.u1), eval(k, &row.u2));
        (x - y).abs() > 1e-6 * (1.0 + x.abs())
    };
    (tie(a) && split(b)) || (tie(b) && split(a))
}

pub fn random_u(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Random member of the weight set.
pub fn random_weight(rng: &mut impl Rng, n: usize) -> WeightVector {
    loop {
        let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = w.iter().sum::<f64>() / n as f64;
        w.iter_mut().for_each(|x| *x -= mean);
        w.sort_by(f64::total_cmp);
        if let Ok(v) = WeightVector::new(w) {
            return v;
        }
    }
}

/// Integer-valued zero-sum weights scaled by 1/4, so every product and
/// partial sum with eighth-grid outcomes is exact in `f64`.
pub fn dyadic_weight(rng: &mut impl Rng, n: usize) -> WeightVector {
    loop {
        let mut w: Vec<i64> = (0..n - 1).map(|_| rng.gen_range(-40..=40)).collect();
        w.push(-w.iter().sum::<i64>());
        w.sort();
        if let Ok(v) = WeightVector::new(w.iter().map(|&x| x as f64 / 4.0).collect()) {
            return v;
        }
    }
}

pub fn dyadic_u(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-800i64..=800) as f64 / 8.0).collect()
}

/// The kinds with a closed form at any dimension.
pub fn table_kinds() -> [MeasureKind; 8] {
    MeasureKind::table()
}
