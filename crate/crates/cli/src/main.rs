use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod plot;

use commands::CliError;

/// Mutually polar retraction pairs on convex cones.
///
/// Exit codes: 0 ok, 1 usage or parse error, 2 property violation,
/// 3 construction hypothesis not met, 4 required witness not found.
#[derive(Debug, Parser)]
#[command(name = "coneretract", version)]
struct Cli {
    /// Base tolerance for memberships and residuals.
    #[arg(long, global = true, env = "CONERETRACT_TOL")]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Cone specification file (JSON).
    #[arg(long)]
    spec: PathBuf,

    /// Write the JSON result here and print a summary instead.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Moreau decomposition of points with respect to one cone.
    Project {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        cone: String,
        /// Point as comma-separated coordinates; repeatable.
        #[arg(long = "x", required = true, allow_hyphen_values = true, value_parser = parse_point)]
        points: Vec<Point>,
    },
    /// Evaluate the retraction pair with ranges M and N.
    Retract {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: String,
        #[arg(long)]
        n: String,
        #[arg(long = "x", required = true, allow_hyphen_values = true, value_parser = parse_point)]
        points: Vec<Point>,
    },
    /// Sampled property checks for a retraction pair (M, N), or for the
    /// projection pair of a single cone.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long, conflicts_with = "cone", requires = "n")]
        m: Option<String>,
        #[arg(long, requires = "m")]
        n: Option<String>,
        #[arg(long, required_unless_present = "m")]
        cone: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Gauge data and evaluation of the one-range pair for M and the ray N.
    OneRange {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: String,
        #[arg(long)]
        n: String,
        #[arg(long = "x", allow_hyphen_values = true, value_parser = parse_point)]
        points: Vec<Point>,
    },
    /// SVG of the planar sectors and the field x -> Qx.
    Plot {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        m: String,
        #[arg(long)]
        n: String,
        /// SVG output path.
        #[arg(long)]
        out: PathBuf,
        /// Grid points per axis.
        #[arg(long, default_value_t = 9)]
        grid: usize,
        /// In R^3, a point fixing the slice plane through the transversal line.
        #[arg(long = "x", allow_hyphen_values = true, value_parser = parse_point)]
        point: Option<Point>,
        /// Also write one CSV row per grid point.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Counterexample search for order properties that theory says must fail.
    Fuzz {
        #[command(flatten)]
        common: Common,
        /// Joint subadditivity of the projection pair of this cone.
        #[arg(long, required_unless_present = "m")]
        cone: Option<String>,
        /// Subadditivity of the pair with ranges M and -M.
        #[arg(long, conflicts_with = "cone")]
        m: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
}

/// A point given as `v1,v2,...`.
#[derive(Clone, Debug)]
struct Point(Vec<f64>);

fn coords(points: Vec<Point>) -> Vec<Vec<f64>> {
    points.into_iter().map(|p| p.0).collect()
}

fn parse_point(s: &str) -> Result<Point, String> {
    s.split(',')
        .map(|t| {
            let v: f64 = t
                .trim()
                .parse()
                .map_err(|_| format!("bad coordinate {t:?}"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("non-finite coordinate {t:?}"))
            }
        })
        .collect::<Result<_, _>>()
        .map(Point)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let tol = match cli.tol {
        Some(t) if t.is_finite() && t > 0.0 => coneretract::ToleranceConfig::with_base(t),
        Some(t) => {
            return Err(CliError::usage(format!(
                "tolerance must be positive, got {t}"
            )))
        }
        None => coneretract::ToleranceConfig::default(),
    };
    match cli.command {
        Command::Project {
            common,
            cone,
            points,
        } => commands::project(&common.spec, &cone, &coords(points), common.out, &tol),
        Command::Retract {
            common,
            m,
            n,
            points,
        } => commands::retract(&common.spec, &m, &n, &coords(points), common.out, &tol),
        Command::Check {
            common,
            m,
            n,
            cone,
            seed,
            samples,
        } => {
            let target = match (cone, m, n) {
                (Some(c), _, _) => commands::CheckTarget::Cone(c),
                (None, Some(m), Some(n)) => commands::CheckTarget::Pair(m, n),
                _ => return Err(CliError::usage("give --cone, or both --m and --n")),
            };
            commands::check(&common.spec, target, seed, samples, common.out, &tol)
        }
        Command::OneRange {
            common,
            m,
            n,
            points,
        } => commands::one_range(&common.spec, &m, &n, &coords(points), common.out, &tol),
        Command::Plot {
            spec,
            m,
            n,
            out,
            grid,
            point,
            csv,
        } => plot::plot(
            &spec,
            &m,
            &n,
            &out,
            grid,
            point.as_ref().map(|p| p.0.as_slice()),
            csv.as_deref(),
            &tol,
        ),
        Command::Fuzz {
            common,
            cone,
            m,
            seed,
            samples,
        } => {
            let target = match (cone, m) {
                (Some(c), _) => commands::FuzzTarget::Projection(c),
                (None, Some(m)) => commands::FuzzTarget::Opposite(m),
                _ => return Err(CliError::usage("give --cone or --m")),
            };
            commands::fuzz(&common.spec, target, seed, samples, common.out, &tol)
        }
    }
}
