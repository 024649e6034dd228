//! Command-line front end: scenario files, the three subcommands and exit codes.

mod dump;
mod relax;
mod scenario;
mod surface;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::geometry::GeometryLabel;
use crate::hamiltonian::OperatorName;

pub use dump::{build_operator, write_sparse, DUMP_CUTOFF};
pub use relax::{
    equalization_time, fade_time, late_stage_time, run_relax, EpsilonCheck, RelaxOutput,
    RelaxSummary, EQUILIBRATED_GAP, LATE_STAGE_WINDOW,
};
pub use scenario::{PairSelection, Scenario};
pub use surface::{run_surface, ConcurrenceSurface, GridSize, SurfacePoint, SurfaceRequest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub fn exit_code(err: &Error) -> i32 {
    if err.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_NUMERICAL
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "spinthermo",
    version,
    about = "Spin temperature relaxation and pairwise entanglement in small dipolar clusters"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the two-temperature relaxation and write the trajectory.
    Relax {
        #[arg(long)]
        config: PathBuf,
        /// Trajectory CSV; without it the CSV goes to stdout and the summary to stderr.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample pairwise concurrence over the (beta_z, beta_d) plane.
    Surface {
        #[arg(long)]
        config: PathBuf,
        /// Grid resolution as <nz>x<nd>.
        #[arg(long, value_parser = parse_grid)]
        grid: GridSize,
        #[arg(long)]
        zmax: f64,
        #[arg(long)]
        dmax: f64,
        /// Append the relaxation path of the scenario.
        #[arg(long)]
        overlay: bool,
        /// Use the non-equilibrium density matrix.
        #[arg(long)]
        ne_surface: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the nonzero entries of one operator.
    Dump {
        #[arg(long, value_parser = parse_geometry)]
        geometry: GeometryLabel,
        #[arg(long)]
        ratio: f64,
        /// One of Hz, Hdd, Hd, Hnd, H, K.
        #[arg(long, value_parser = parse_op)]
        op: OperatorName,
        #[arg(long, default_value_t = 4)]
        spins: usize,
    },
}

fn parse_grid(s: &str) -> std::result::Result<GridSize, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_geometry(s: &str) -> std::result::Result<GeometryLabel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_op(s: &str) -> std::result::Result<OperatorName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs one parsed command, writing results to files or stdout.
pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Relax { config, out } => {
            let scenario = Scenario::load(config)?;
            let pairs = scenario.pairs.resolve(scenario.geometry()?.spins())?;
            let output = run_relax(&scenario)?;
            output.trajectory.write_csv(sink(out.as_ref())?)?;
            if out.is_some() {
                output.summary.write(&pairs, io::stdout().lock())?;
            } else {
                output.summary.write(&pairs, io::stderr().lock())?;
            }
        }
        Command::Surface {
            config,
            grid,
            zmax,
            dmax,
            overlay,
            ne_surface,
            out,
        } => {
            let scenario = Scenario::load(config)?;
            let req = SurfaceRequest {
                grid: *grid,
                zmax: *zmax,
                dmax: *dmax,
                overlay: *overlay,
                non_equilibrium: *ne_surface,
            };
            run_surface(&scenario, &req)?.write_csv(sink(out.as_ref())?)?;
        }
        Command::Dump {
            geometry,
            ratio,
            op,
            spins,
        } => {
            let m = build_operator(*geometry, *spins, *ratio, *op)?;
            write_sparse(&m, sink(None)?)?;
        }
    }
    Ok(())
}
