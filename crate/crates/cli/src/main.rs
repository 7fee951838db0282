use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};

use newton_curv::geometry::{builtin_geometry, geometry_from_json, Resolution};
use newton_curv_cli::suites::UNIT_S3_VOLUME;
use newton_curv_cli::{
    emit_theorem2_table, run_algebra_suite, run_geometry_suite, run_theorem1_suite, AlgebraConfig, GeometryConfig,
    Mode, SuiteReport, Theorem1Config, Tolerances,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Algebra,
    Theorem1,
    Geometry,
    Theorem2Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Verify mean curvature identities for distributions on seeded random data
/// and model geometries.
#[derive(Debug, Parser)]
#[command(name = "newton-curv", version)]
struct Args {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Dimension of D. For the table, the largest n listed.
    #[arg(long)]
    n: Option<usize>,
    /// Dimension of F. For the table, the largest l listed.
    #[arg(long)]
    l: Option<usize>,
    /// Even order; repeat for several.
    #[arg(long = "r")]
    r: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Quadrature nodes per bounded axis.
    #[arg(long, default_value_t = Resolution::DEFAULT_NODES)]
    resolution: usize,
    /// Built-in geometry name or a path to a JSON description.
    #[arg(long, default_value = "hopf-s3")]
    geometry: String,
    /// Sampled points for pointwise geometry checks.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol_algebra: f64,
    #[arg(long, default_value_t = 1e-3)]
    tol_geometry: f64,
    #[arg(long, default_value_t = 1e-2)]
    tol_integral: f64,
    /// Skip the grid integral of the divergence.
    #[arg(long)]
    no_divergence_integral: bool,
    #[arg(long, value_enum, default_value_t = Mode::Float)]
    mode: Mode,
    /// Curvature used by the table.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// Volume used by the table.
    #[arg(long, default_value_t = UNIT_S3_VOLUME)]
    vol: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here; a text summary then goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("NEWTON_CURV_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| format!("NEWTON_CURV_THREADS must be a count, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn load_geometry(spec: &str) -> newton_curv::Result<newton_curv::geometry::ModelGeometry> {
    if spec.ends_with(".json") || std::path::Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec)
            .map_err(|e| newton_curv::Error::Validation(format!("cannot read {spec}: {e}")))?;
        geometry_from_json(&text)
    } else {
        builtin_geometry(spec)
    }
}

fn run_suite(args: &Args) -> newton_curv::Result<SuiteReport> {
    let orders = |default: Vec<usize>| if args.r.is_empty() { default } else { args.r.clone() };
    match args.suite {
        Suite::Algebra => run_algebra_suite(&AlgebraConfig {
            n: args.n.unwrap_or(4),
            l: args.l.unwrap_or(2),
            orders: orders(vec![2]),
            trials: args.trials,
            seed: args.seed,
            mode: args.mode,
            tol: args.tol_algebra,
        }),
        Suite::Theorem1 => run_theorem1_suite(&Theorem1Config {
            n: args.n.unwrap_or(4),
            l: args.l.unwrap_or(2),
            orders: orders(vec![2]),
            trials: args.trials,
            seed: args.seed,
            tol: args.tol_algebra,
        }),
        Suite::Geometry => {
            let g = load_geometry(&args.geometry)?;
            run_geometry_suite(
                &g,
                &GeometryConfig {
                    orders: orders(vec![0]),
                    nodes: args.resolution,
                    samples: args.samples,
                    seed: args.seed,
                    tol: Tolerances {
                        algebra: args.tol_algebra,
                        geometry: args.tol_geometry,
                        integral: args.tol_integral,
                    },
                    divergence_integral: !args.no_divergence_integral,
                    ..Default::default()
                },
            )
        }
        Suite::Theorem2Table => unreachable!("handled separately"),
    }
}

fn emit(args: &Args, rendered: String, summary: String) -> Result<(), String> {
    match &args.out {
        Some(path) => {
            std::fs::write(path, rendered).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            print!("{summary}");
        }
        None => print!("{rendered}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }

    if args.suite == Suite::Theorem2Table {
        let n_max = args.n.unwrap_or(6);
        let l_max = args.l.unwrap_or(4);
        let table = match emit_theorem2_table(1..=n_max, 1..=l_max, 1..=n_max / 2, args.c, args.vol) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        };
        let rendered = match args.format {
            Format::Json => table.to_json(),
            Format::Csv => table.to_csv(),
            Format::Text => table.to_text(),
        };
        return match emit(&args, rendered, table.to_text()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }

    let start = Instant::now();
    let mut report = match run_suite(&args) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    report.wall_time = Some(start.elapsed());
    let rendered = match args.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
        Format::Text => report.to_text(),
    };
    if let Err(e) = emit(&args, rendered, report.to_text()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    eprintln!("{} suite finished in {:.2}s", report.suite, start.elapsed().as_secs_f64());
    if report.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
