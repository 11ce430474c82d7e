use std::path::PathBuf;

use clap::Args;
use fairopt::measures::MeasureKind;
use fairopt::stability::{reports_to_csv, run_stability_experiment, StabilityConfig};

use crate::error::CliError;
use crate::common::{parse_measure, write_file};

#[derive(Args, Debug)]
pub struct StabilityArgs {
    /// Subject counts.
    #[arg(long, value_delimiter = ',', default_value = "5,8,12")]
    pub ns: Vec<usize>,
    /// Largest γ of the grid.
    #[arg(long, default_value_t = 2.0)]
    pub gamma_max: f64,
    /// Number of evenly spaced γ values from 0.
    #[arg(long, default_value_t = 11)]
    pub gamma_points: usize,
    #[arg(long, default_value_t = 20)]
    pub replications: usize,
    #[arg(long, value_parser = parse_measure, default_value = "max_mad")]
    pub base: MeasureKind,
    /// Comparison measures; MAD, GD and SMaxPD by default.
    #[arg(long, value_parser = parse_measure)]
    pub measure: Vec<MeasureKind>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// C&CG relative gap.
    #[arg(long)]
    pub eps: Option<f64>,
    /// CSV grid path; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: StabilityArgs) -> Result<(), CliError> {
    if args.gamma_points < 2 || !(args.gamma_max > 0.0) {
        return Err(CliError::Config("γ grid needs at least two points and a positive maximum".into()));
    }
    let mut cfg = StabilityConfig::standard(args.ns.clone(), args.seed);
    let step = args.gamma_max / (args.gamma_points - 1) as f64;
    cfg.gammas = (0..args.gamma_points).map(|k| k as f64 * step).collect();
    cfg.replications = args.replications;
    cfg.base = args.base.clone();
    if !args.measure.is_empty() {
        cfg.comparisons = args.measure.clone();
    }
    if let Some(eps) = args.eps {
        if !(eps > 0.0) {
            return Err(CliError::Config(format!("--eps must be positive, got {eps}")));
        }
        cfg.eps = eps;
    }
    let reports = run_stability_experiment(&cfg).map_err(|e| match e {
        fairopt::stability::StabilityError::Ccg(c) => CliError::from(c),
        other => CliError::Config(other.to_string()),
    })?;
    let csv = reports_to_csv(&reports);
    match &args.out {
        Some(path) => {
            write_file(path, &csv)?;
            for r in &reports {
                let ok = r.cells.iter().all(|c| c.bound_ok && c.distance_bound_ok);
                println!("N={:<3} {:<16} d_H={:.4}  bounds {}", r.n, r.pair(), r.d_h, if ok { "hold" } else { "VIOLATED" });
            }
        }
        None => print!("{csv}"),
    }
    Ok(())
}
