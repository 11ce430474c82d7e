use std::path::PathBuf;

use clap::Args;
use fairopt::dualsets::{dual_set_of, support_value};
use fairopt::measures::{eval_closed_form, eval_relative, MeasureKind, OutcomeVector};
use serde::{Deserialize, Serialize};

use super::SCHEMA;
use crate::error::CliError;
use crate::common::{fmt_num, parse_measure, read_file, to_json, write_file};

const AGREE_TOL: f64 = 1e-8;

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Outcome vector, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "instance")]
    pub u: Option<Vec<f64>>,
    /// JSON file holding `[u…]` or `{"u": [u…]}`.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Measures to evaluate; all eight table measures by default.
    #[arg(long, value_parser = parse_measure)]
    pub measure: Vec<MeasureKind>,
    /// Fail instead of skipping the relative value when some outcome is negative.
    #[arg(long)]
    pub relative: bool,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OutcomeFile {
    Bare(Vec<f64>),
    Wrapped { u: Vec<f64> },
}

#[derive(Debug, Serialize)]
struct Row {
    measure: MeasureKind,
    value: f64,
    relative: Option<f64>,
    dual: f64,
    agree: bool,
}

#[derive(Debug, Serialize)]
struct Report {
    schema: u32,
    command: &'static str,
    u: Vec<f64>,
    rows: Vec<Row>,
}

fn outcomes(args: &EvalArgs) -> Result<Vec<f64>, CliError> {
    if let Some(u) = &args.u {
        return Ok(u.clone());
    }
    let path = args.instance.as_ref().ok_or_else(|| CliError::Config("eval needs --u or --instance".into()))?;
    let parsed: OutcomeFile =
        serde_json::from_str(&read_file(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(match parsed {
        OutcomeFile::Bare(u) | OutcomeFile::Wrapped { u } => u,
    })
}

pub fn run(args: EvalArgs) -> Result<(), CliError> {
    let u = OutcomeVector::new(outcomes(&args)?).map_err(|e| CliError::Parse(e.to_string()))?;
    let kinds = if args.measure.is_empty() { MeasureKind::table().to_vec() } else { args.measure.clone() };
    let negative = u.as_slice().iter().any(|&v| v < 0.0);
    if negative && args.relative {
        return Err(CliError::Config("relative values need nonnegative outcomes".into()));
    }
    let mut rows = Vec::with_capacity(kinds.len());
    for kind in kinds {
        let value = eval_closed_form(&kind, &u).map_err(|e| CliError::Config(format!("{kind}: {e}")))?;
        let relative = if negative { None } else { Some(eval_relative(&kind, &u).map_err(|e| CliError::Config(e.to_string()))?) };
        let ds = dual_set_of(&kind, u.len()).map_err(|e| CliError::Config(e.to_string()))?;
        let (dual, _) = support_value(&ds, &u).map_err(|e| CliError::Config(e.to_string()))?;
        let agree = (dual - value).abs() <= AGREE_TOL * (1.0 + value.abs());
        rows.push(Row { measure: kind, value, relative, dual, agree });
    }
    println!("{:<28} {:>14} {:>10} {:>14}  agree", "measure", "value", "relative", "dual");
    for r in &rows {
        let rel = r.relative.map_or("-".to_string(), fmt_num);
        println!("{:<28} {:>14} {:>10} {:>14}  {}", r.measure.tag(), fmt_num(r.value), rel, fmt_num(r.dual), r.agree);
    }
    if let Some(path) = &args.out {
        let report = Report { schema: SCHEMA, command: "eval", u: u.into_inner(), rows };
        write_file(path, &to_json(&report))?;
    }
    Ok(())
}
