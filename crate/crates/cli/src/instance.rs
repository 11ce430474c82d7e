//! Instance files and the flags that override them.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fairopt::measures::MeasureKind;
use fairopt::models::{build_flp, build_ra, AllocationInstance, FacilityInstance};
use fairopt::reform::{Mode, ProblemInstance};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::common::read_file;

/// `{"type": "ra" | "flp" | "problem", …}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InstanceFile {
    Ra(AllocationInstance),
    Flp(FacilityInstance),
    Problem(ProblemInstance),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Objective,
    Constraint,
    Relative,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Instance JSON file.
    #[arg(long)]
    pub instance: PathBuf,
    /// Fairness weight; for facility instances, the efficiency share in [0, 1].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Fairness budget for the constraint modes.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// C&CG relative gap.
    #[arg(long, default_value_t = 1e-4)]
    pub eps: f64,
    /// Wall-clock limit per LP/MILP solve, in seconds.
    #[arg(long = "time-limit")]
    pub time_limit: Option<f64>,
}

pub fn load(path: &Path) -> Result<InstanceFile, CliError> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// Builds the problem after applying `--measure`, `--gamma`, `--mode`
/// and `--eta`.
pub fn configure(file: &InstanceFile, measure: Option<&MeasureKind>, args: &ModelArgs) -> Result<ProblemInstance, CliError> {
    if !(args.eps > 0.0) {
        return Err(CliError::Config(format!("--eps must be positive, got {}", args.eps)));
    }
    if let Some(t) = args.time_limit {
        if !(t > 0.0) {
            return Err(CliError::Config(format!("--time-limit must be positive, got {t}")));
        }
    }
    let config = |e: fairopt::models::ModelsError| CliError::Config(e.to_string());
    let mut p = match file.clone() {
        InstanceFile::Ra(mut ai) => {
            if let Some(m) = measure {
                ai.measure = m.clone();
            }
            if let Some(g) = args.gamma {
                ai.gamma = g;
            }
            build_ra(&ai).map_err(config)?
        }
        InstanceFile::Flp(mut fi) => {
            if let Some(m) = measure {
                fi.measure = m.clone();
            }
            if let Some(g) = args.gamma {
                fi.gamma = g;
            }
            build_flp(&fi).map_err(config)?
        }
        InstanceFile::Problem(mut p) => {
            if let Some(m) = measure {
                p.measure = m.clone();
            }
            if let (Some(g), Mode::Objective { .. }) = (args.gamma, p.mode) {
                p.mode = Mode::Objective { gamma: g };
            }
            p
        }
    };
    p.mode = resolve_mode(p.mode, args)?;
    p.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(p)
}

fn resolve_mode(current: Mode, args: &ModelArgs) -> Result<Mode, CliError> {
    let stored_eta = match current {
        Mode::Constraint { eta } | Mode::RelativeConstraint { eta } => Some(eta),
        Mode::Objective { .. } => None,
    };
    let eta = || {
        args.eta
            .or(stored_eta)
            .ok_or_else(|| CliError::Config("constraint modes need --eta".into()))
    };
    Ok(match args.mode {
        None => match current {
            Mode::Objective { .. } if args.eta.is_some() => {
                return Err(CliError::Config("--eta needs --mode constraint or relative".into()))
            }
            Mode::Objective { .. } => current,
            Mode::Constraint { .. } => Mode::Constraint { eta: eta()? },
            Mode::RelativeConstraint { .. } => Mode::RelativeConstraint { eta: eta()? },
        },
        Some(ModeArg::Objective) => match current {
            Mode::Objective { .. } => current,
            _ => Mode::Objective {
                gamma: args.gamma.ok_or_else(|| CliError::Config("--mode objective needs --gamma".into()))?,
            },
        },
        Some(ModeArg::Constraint) => Mode::Constraint { eta: eta()? },
        Some(ModeArg::Relative) => Mode::RelativeConstraint { eta: eta()? },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fairopt::models::random_ra;

    fn args(mode: Option<ModeArg>, gamma: Option<f64>, eta: Option<f64>) -> ModelArgs {
        ModelArgs { instance: PathBuf::new(), gamma, eta, mode, eps: 1e-4, time_limit: None }
    }

    #[test]
    fn overrides_apply() {
        let file = InstanceFile::Ra(random_ra(4, 0.5, MeasureKind::Mad, 1).unwrap());
        let p = configure(&file, Some(&MeasureKind::GiniDeviation), &args(None, Some(2.0), None)).unwrap();
        assert_eq!(p.measure, MeasureKind::GiniDeviation);
        assert_eq!(p.mode, Mode::Objective { gamma: 2.0 });
        let p = configure(&file, None, &args(Some(ModeArg::Relative), None, Some(0.1))).unwrap();
        assert_eq!(p.mode, Mode::RelativeConstraint { eta: 0.1 });
    }

    #[test]
    fn inconsistent_flags_rejected() {
        let file = InstanceFile::Ra(random_ra(4, 0.5, MeasureKind::Mad, 1).unwrap());
        assert!(configure(&file, None, &args(None, None, Some(1.0))).is_err());
        assert!(configure(&file, None, &args(Some(ModeArg::Constraint), None, None)).is_err());
        let mut bad = args(None, None, None);
        bad.eps = 0.0;
        assert!(configure(&file, None, &bad).is_err());
    }

    #[test]
    fn tagged_json() {
        let file = InstanceFile::Ra(random_ra(3, 0.5, MeasureKind::Mad, 2).unwrap());
        let json = serde_json::to_value(&file).unwrap();
        assert_eq!(json["type"], "ra");
        let back: InstanceFile = serde_json::from_value(json).unwrap();
        assert_eq!(back, file);
    }
}
