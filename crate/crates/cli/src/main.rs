//! `relgeo4` — relative differential geometry of parametric hypersurfaces
//! in R^4.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use relgeo4::commands::{self, CommandError};
use relgeo4::report::Report;
use relgeo4::surface::SurfaceSpec;
use relgeo4::tol;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "relgeo4",
    version,
    about = "Relative differential geometry of parametric hypersurfaces in R^4",
    long_about = "Computes relative normalizations, shape operators and curvature \
                  functions of parametric hypersurfaces in R^4, constructs relatively \
                  parallel families, and evaluates the closed-form relative distances \
                  at which a parallel hypersurface gains a constant curvature function."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug)]
struct GridArg([usize; 3]);

impl FromStr for GridArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split('x').collect();
        let dims: Option<Vec<usize>> = parts.iter().map(|p| p.parse().ok()).collect();
        match dims.as_deref() {
            Some([a, b, c]) if *a > 0 && *b > 0 && *c > 0 => Ok(GridArg([*a, *b, *c])),
            _ => Err(format!("expected a grid like 7x7x7, got `{s}`")),
        }
    }
}

impl fmt::Display for GridArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.0[0], self.0[1], self.0[2])
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args)]
struct OutputOpts {
    /// Report format on stdout
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also write the per-point table to this CSV file
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Curvature functions, frame-law residuals and constancy on a grid
    Analyze {
        /// Surface definition file
        spec: PathBuf,
        /// Override the grid from the spec file (AxBxC)
        #[arg(long)]
        grid: Option<GridArg>,
        /// Relative-spread threshold for calling a function constant
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Starred quantities of the relatively parallel hypersurface at a distance
    Parallel {
        spec: PathBuf,
        /// Relative distance of the offset (nonzero)
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long)]
        grid: Option<GridArg>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Existence results: candidate distances and measured predictions
    Bonnet {
        spec: PathBuf,
        #[arg(long)]
        grid: Option<GridArg>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Candidate distances as pure formula evaluation from -H/-H2/-K inputs
    Roots {
        /// Relative mean curvature
        #[arg(long = "H", allow_hyphen_values = true)]
        h: Option<f64>,
        /// Second relative mean curvature
        #[arg(long = "H2", allow_hyphen_values = true)]
        h2: Option<f64>,
        /// Relative Gauss-Kronecker curvature
        #[arg(long = "K", allow_hyphen_values = true)]
        k: Option<f64>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Run the full invariant suite; exit 1 on any failed check
    Verify {
        spec: PathBuf,
        #[arg(long)]
        grid: Option<GridArg>,
        #[command(flatten)]
        output: OutputOpts,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    };
    std::process::exit(code);
}

fn load(path: &Path) -> Result<SurfaceSpec, CommandError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CommandError::Input(format!("cannot read `{}`: {e}", path.display())))?;
    Ok(SurfaceSpec::parse(&text)?)
}

fn emit(report: &Report, output: &OutputOpts) -> Result<(), CommandError> {
    match output.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => print!("{}", report.to_json()),
    }
    if let Some(path) = &output.csv {
        std::fs::write(path, report.points_csv())
            .map_err(|e| CommandError::Input(format!("cannot write `{}`: {e}", path.display())))?;
    }
    Ok(())
}

fn execute(command: Command) -> Result<i32, CommandError> {
    match command {
        Command::Analyze {
            spec,
            grid,
            tol,
            output,
        } => {
            let spec = load(&spec)?;
            let grid = grid.map(|g| g.0).unwrap_or(spec.grid);
            let report = commands::cmd_analyze(&spec, grid, tol.unwrap_or(tol::CONSTANCY_TOL))?;
            emit(&report, &output)?;
            Ok(0)
        }
        Command::Parallel {
            spec,
            mu,
            grid,
            output,
        } => {
            let spec = load(&spec)?;
            let grid = grid.map(|g| g.0).unwrap_or(spec.grid);
            let report = commands::cmd_parallel(&spec, mu, grid)?;
            emit(&report, &output)?;
            Ok(0)
        }
        Command::Bonnet {
            spec,
            grid,
            tol,
            output,
        } => {
            let spec = load(&spec)?;
            let grid = grid.map(|g| g.0).unwrap_or(spec.grid);
            let report = commands::cmd_bonnet(&spec, grid, tol.unwrap_or(tol::CONSTANCY_TOL))?;
            emit(&report, &output)?;
            Ok(0)
        }
        Command::Roots { h, h2, k, output } => {
            if h.is_none() && h2.is_none() && k.is_none() {
                return Err(CommandError::Input(
                    "provide at least one of --H, --H2, --K".into(),
                ));
            }
            let report = commands::cmd_roots(h, h2, k);
            emit(&report, &output)?;
            Ok(0)
        }
        Command::Verify { spec, grid, output } => {
            let spec = load(&spec)?;
            let grid = grid.map(|g| g.0).unwrap_or(spec.grid);
            let report = commands::cmd_verify(&spec, grid)?;
            emit(&report, &output)?;
            Ok(if report.summary.verdict == Some(true) {
                0
            } else {
                1
            })
        }
    }
}
