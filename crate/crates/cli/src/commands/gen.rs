use std::path::PathBuf;

use clap::{ArgGroup, Args};
use fairopt::measures::MeasureKind;
use fairopt::models::{random_flp, random_ra};

use crate::error::CliError;
use crate::instance::InstanceFile;
use crate::common::{parse_measure, to_json, write_file};

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("family").required(true).args(["ra", "flp"])))]
pub struct GenArgs {
    /// Resource allocation instance.
    #[arg(long)]
    pub ra: bool,
    /// Facility location instance.
    #[arg(long)]
    pub flp: bool,
    /// Subjects (allocation) or customers (facility location).
    #[arg(long)]
    pub n: usize,
    /// Facilities to open.
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to 1 for allocation and 0.5 for facility location.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_parser = parse_measure, default_value = "mad")]
    pub measure: MeasureKind,
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: GenArgs) -> Result<(), CliError> {
    let config = |e: fairopt::models::ModelsError| CliError::Config(e.to_string());
    let file = if args.ra {
        InstanceFile::Ra(random_ra(args.n, args.gamma.unwrap_or(1.0), args.measure.clone(), args.seed).map_err(config)?)
    } else {
        InstanceFile::Flp(
            random_flp(args.n, args.p, args.gamma.unwrap_or(0.5), args.measure.clone(), args.seed).map_err(config)?,
        )
    };
    let json = to_json(&file);
    match &args.out {
        Some(path) => write_file(path, &json),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}
