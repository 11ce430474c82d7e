use std::path::PathBuf;

use clap::Args;
use fairopt::dualsets::{check_equivalent, dual_set_of};
use fairopt::measures::{eval_closed_form, MeasureKind, OutcomeVector};
use serde::Serialize;

use super::SCHEMA;
use crate::error::CliError;
use crate::common::{fmt_num, fmt_vec, parse_measure, to_json, write_file};

#[derive(Args, Debug)]
pub struct EquivArgs {
    #[arg(value_parser = parse_measure)]
    pub first: MeasureKind,
    #[arg(value_parser = parse_measure)]
    pub second: MeasureKind,
    /// Number of subjects.
    pub n: usize,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A pair of outcome vectors from the non-equivalence table.
#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub row: &'static str,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

fn fill(head: &[f64], mid: f64, tail: &[f64], n: usize) -> Option<Vec<f64>> {
    let k = n.checked_sub(head.len() + tail.len())?;
    let mut v = head.to_vec();
    v.extend(std::iter::repeat_n(mid, k));
    v.extend_from_slice(tail);
    Some(v)
}

/// Rows A, B, B′ (N = 5 only), C, D and E at dimension `n`.
pub fn witness_rows(n: usize) -> Vec<Witness> {
    let mut rows = Vec::new();
    let mut push = |row, u1: Option<Vec<f64>>, u2: Option<Vec<f64>>| {
        if let (Some(u1), Some(u2)) = (u1, u2) {
            rows.push(Witness { row, u1, u2 });
        }
    };
    push("A", fill(&[1.0, 2.0], 2.5, &[4.5], n), fill(&[1.0, 1.0], 2.0, &[4.0], n));
    push("B", fill(&[2.0], 5.0, &[9.0], n), fill(&[2.0, 2.0], 4.0, &[8.0], n));
    if n == 5 {
        push("B'", Some(vec![2.0, 5.0, 5.0, 6.0, 9.0]), Some(vec![2.0, 2.0, 4.0, 4.0, 8.0]));
    }
    push("C", fill(&[2.0, 5.0], 16.0 / 3.0, &[9.0], n), fill(&[2.0, 2.0], 13.0 / 3.0, &[9.0], n));
    let s21 = 21f64.sqrt();
    push("D", fill(&[1.0, 2.0], 3.0, &[6.0], n), fill(&[3.0, 3.0], 3.0 + s21 / 3.0, &[3.0 + s21], n));
    push("E", fill(&[1.0], 7.0, &[8.0, 12.0], n), fill(&[5.0, 10.0], 10.5, &[13.0, 14.0], n));
    rows
}

fn value(kind: &MeasureKind, u: &[f64]) -> f64 {
    OutcomeVector::new(u.to_vec()).and_then(|v| eval_closed_form(kind, &v)).expect("finite witness")
}

/// First row on which one measure ties (within 1e-9) and the other
/// splits (by more than 1e-6).
pub fn find_witness(a: &MeasureKind, b: &MeasureKind, n: usize) -> Option<Witness> {
    let diff = |k: &MeasureKind, w: &Witness| {
        let (x, y) = (value(k, &w.u1), value(k, &w.u2));
        (x - y).abs() / (1.0 + x.abs())
    };
    witness_rows(n).into_iter().find(|w| {
        let (da, db) = (diff(a, w), diff(b, w));
        (da <= 1e-9 && db > 1e-6) || (db <= 1e-9 && da > 1e-6)
    })
}

#[derive(Debug, Serialize)]
struct Report {
    schema: u32,
    command: &'static str,
    first: MeasureKind,
    second: MeasureKind,
    n: usize,
    equivalent: bool,
    beta: Option<f64>,
    witness: Option<Witness>,
}

pub fn run(args: EquivArgs) -> Result<(), CliError> {
    let config = |e: fairopt::dualsets::DualSetError| CliError::Config(e.to_string());
    let a = dual_set_of(&args.first, args.n).map_err(config)?;
    let b = dual_set_of(&args.second, args.n).map_err(config)?;
    let beta = check_equivalent(&a, &b).map_err(config)?;
    let mut witness = None;
    match beta {
        Some(beta) => println!("EQUIVALENT beta={}", fmt_num(beta)),
        None => {
            println!("NOT EQUIVALENT");
            witness = find_witness(&args.first, &args.second, args.n);
            if let Some(w) = &witness {
                println!("witness row {}", w.row);
                for u in [&w.u1, &w.u2] {
                    println!(
                        "  u = {}: {} {}, {} {}",
                        fmt_vec(u),
                        args.first.tag(),
                        fmt_num(value(&args.first, u)),
                        args.second.tag(),
                        fmt_num(value(&args.second, u))
                    );
                }
            }
        }
    }
    if let Some(path) = &args.out {
        let report = Report {
            schema: SCHEMA,
            command: "equiv",
            first: args.first,
            second: args.second,
            n: args.n,
            equivalent: beta.is_some(),
            beta,
            witness,
        };
        write_file(path, &to_json(&report))?;
    }
    Ok(())
}
