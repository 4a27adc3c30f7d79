mod checks;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use equimid::dsl::ScalarField;
use equimid::geometry::{EpigraphFocal, SearchBox};
use equimid::hyperboloid;
use equimid::parametric::{EquidistantParam, NewtonConfig};
use equimid::sample::{self, AxisRange};
use equimid::solver::solve_g_at;

use table::Table;

const HYPERBOLOID_SRC: &str = "sqrt(norm2() + 1)";

#[derive(Parser)]
#[command(
    name = "equimid",
    version,
    about = "Equidistant functions of a hyperplane and the epigraph of a positive field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the field, the midset and the equidistant function over a region
    Sample(SampleArgs),
    /// Run a verification check; exit code 0 means everything passed
    Check(checks::CheckArgs),
    /// Compare the closed-form hyperboloid solution against the numerical routes
    Golden(GoldenArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Bisect,
    Parametric,
    Golden,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SampleArgs {
    /// Field expression over t1..tn (e.g. "sqrt(t1^2+1)")
    #[arg(long = "f")]
    field: Option<String>,
    /// Dimension of the parameter space
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Mode::Bisect)]
    mode: Mode,
    /// Sample range MIN:MAX:COUNT; repeat per axis or give one for all
    #[arg(long = "range", allow_hyphen_values = true)]
    ranges: Vec<String>,
    /// Solver tolerance (bisection residual or Newton residual)
    #[arg(long)]
    tol: Option<f64>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct GoldenArgs {
    /// Dimension of the abscissa space
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Sample range MIN:MAX:COUNT; repeat per axis or give one for all
    #[arg(long = "range", allow_hyphen_values = true)]
    ranges: Vec<String>,
    /// Bisection residual tolerance
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

/// Failures split by exit code: usage and input parsing map to 2,
/// runtime and check failures map to 1.
pub enum Failure {
    Usage(String),
    Run(String),
}

pub type CliResult<T> = Result<T, Failure>;

impl From<equimid::Error> for Failure {
    fn from(e: equimid::Error) -> Self {
        match e {
            equimid::Error::Syntax { .. }
            | equimid::Error::Dimension { .. }
            | equimid::Error::DimensionMismatch { .. } => Failure::Usage(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sample(args) => cmd_sample(args),
        Command::Check(args) => checks::cmd_check(args),
        Command::Golden(args) => cmd_golden(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

pub fn ensure_dimension(n: usize) -> CliResult<()> {
    if n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    Ok(())
}

pub fn parse_field(src: &str, n: usize) -> CliResult<ScalarField<f64>> {
    ensure_dimension(n)?;
    Ok(ScalarField::parse(src, n)?)
}

/// `MIN:MAX:COUNT`, one per axis (a single range is replicated).
pub fn parse_ranges(
    specs: &[String],
    n: usize,
    default: (f64, f64, usize),
) -> CliResult<Vec<AxisRange<f64>>> {
    let parse_one = |raw: &str| -> CliResult<AxisRange<f64>> {
        let parts: Vec<&str> = raw.split(':').collect();
        if parts.len() != 3 {
            return Err(Failure::Usage(format!(
                "range `{raw}` must have the form MIN:MAX:COUNT"
            )));
        }
        let min: f64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("bad range minimum `{}`", parts[0])))?;
        let max: f64 = parts[1]
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("bad range maximum `{}`", parts[1])))?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("bad range count `{}`", parts[2])))?;
        if count < 2 {
            return Err(Failure::Usage("range count must be at least 2".into()));
        }
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Failure::Usage(format!(
                "range `{raw}` must be finite with MIN < MAX"
            )));
        }
        Ok(AxisRange::new(min, max, count))
    };
    match specs.len() {
        0 => Ok(vec![AxisRange::new(default.0, default.1, default.2); n]),
        1 => Ok(vec![parse_one(&specs[0])?; n]),
        k if k == n => specs.iter().map(|s| parse_one(s)).collect(),
        k => Err(Failure::Usage(format!(
            "got {k} ranges for {n} axes; give one range or exactly {n}"
        ))),
    }
}

/// Epigraph oracle over the sampled region, padded so the minimizing
/// parameter stays interior for queries inside the region.
pub fn focal_over(field: ScalarField<f64>, region: &[AxisRange<f64>]) -> EpigraphFocal<f64> {
    let lo = region
        .iter()
        .map(|a| a.min - 0.25 * (a.max - a.min) - 1.0)
        .collect();
    let hi = region
        .iter()
        .map(|a| a.max + 0.25 * (a.max - a.min) + 1.0)
        .collect();
    EpigraphFocal::new(field, SearchBox::new(lo, hi))
}

/// Thread pool capped by EQUIMID_THREADS (all cores when unset).
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("EQUIMID_THREADS") {
        let threads: usize = v.parse().map_err(|_| {
            Failure::Usage(format!(
                "EQUIMID_THREADS must be a positive integer, got `{v}`"
            ))
        })?;
        if threads == 0 {
            return Err(Failure::Usage(
                "EQUIMID_THREADS must be a positive integer".into(),
            ));
        }
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| Failure::Run(format!("thread pool: {e}")))
}

pub fn write_table(t: &Table, format: Format, out: &Option<PathBuf>) -> CliResult<()> {
    let write_to = |w: &mut dyn Write| -> io::Result<()> {
        match format {
            Format::Csv => t.write_csv(w),
            Format::Json => t.write_json(w),
        }
    };
    match out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| Failure::Run(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            write_to(&mut w).map_err(|e| Failure::Run(format!("write failed: {e}")))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write_to(&mut w).map_err(|e| Failure::Run(format!("write failed: {e}")))
        }
    }
}

fn axis_names(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

fn cmd_sample(args: SampleArgs) -> CliResult<u8> {
    let n = args.n;
    ensure_dimension(n)?;
    let region = parse_ranges(&args.ranges, n, (-4.0, 4.0, 101))?;
    let points = sample::grid(&region);
    let pool = thread_pool()?;

    let table = match args.mode {
        Mode::Parametric => {
            let src = args.field.as_deref().ok_or_else(|| {
                Failure::Usage("--mode parametric needs a field expression via --f".into())
            })?;
            let field = parse_field(src, n)?;
            let mut newton = NewtonConfig::default();
            if let Some(tol) = args.tol {
                newton.tol = tol;
            }
            let param = EquidistantParam::new(field.clone())
                .map_err(|_| {
                    Failure::Usage(
                        "--mode parametric needs a differentiable field (no abs/min/max)".into(),
                    )
                })?
                .with_newton(newton);
            let rows: Vec<(f64, Vec<f64>, f64)> = pool.install(|| {
                points
                    .par_iter()
                    .map(|t| {
                        let f = field.eval(t);
                        let (x, y) = param.param_point(t)?;
                        Ok((f, x, y))
                    })
                    .collect::<Result<_, equimid::Error>>()
            })?;
            let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
            for (k, name) in axis_names("t", n).into_iter().enumerate() {
                columns.push((name, points.iter().map(|t| t[k]).collect()));
            }
            columns.push(("f".into(), rows.iter().map(|r| r.0).collect()));
            for (k, name) in axis_names("x", n).into_iter().enumerate() {
                columns.push((name, rows.iter().map(|r| r.1[k]).collect()));
            }
            columns.push(("y".into(), rows.iter().map(|r| r.2).collect()));
            Table::new(columns)
        }
        Mode::Bisect => {
            let src = args.field.as_deref().ok_or_else(|| {
                Failure::Usage("--mode bisect needs a field expression via --f".into())
            })?;
            let field = parse_field(src, n)?;
            let focal = focal_over(field, &region);
            let tol = args.tol.unwrap_or(1e-10);
            let gs: Vec<f64> = pool.install(|| {
                points
                    .par_iter()
                    .map(|x| solve_g_at(x, &focal, tol))
                    .collect::<Result<_, equimid::Error>>()
            })?;
            let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
            for (k, name) in axis_names("x", n).into_iter().enumerate() {
                columns.push((name, points.iter().map(|x| x[k]).collect()));
            }
            columns.push(("G".into(), gs));
            Table::new(columns)
        }
        Mode::Golden => {
            if args.field.is_some() {
                return Err(Failure::Usage(
                    "--mode golden uses the built-in hyperboloid field; drop --f".into(),
                ));
            }
            let gs: Vec<f64> = points.iter().map(|x| hyperboloid::golden_g(x)).collect();
            let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
            for (k, name) in axis_names("x", n).into_iter().enumerate() {
                columns.push((name, points.iter().map(|x| x[k]).collect()));
            }
            columns.push(("G".into(), gs));
            Table::new(columns)
        }
    };
    write_table(&table, args.format, &args.out)?;
    Ok(0)
}

fn cmd_golden(args: GoldenArgs) -> CliResult<u8> {
    let n = args.n;
    ensure_dimension(n)?;
    let region = parse_ranges(&args.ranges, n, (-8.0, 8.0, 201))?;
    let points = sample::grid(&region);
    let tol = args.tol.unwrap_or(1e-10);

    let field = parse_field(HYPERBOLOID_SRC, n)?;
    let focal = focal_over(field.clone(), &region);
    let param = EquidistantParam::new(field).expect("hyperboloid field is differentiable");
    let pool = thread_pool()?;

    struct Row {
        golden: f64,
        bisect: f64,
        parametric: f64,
        radial: f64,
    }
    let rows: Vec<Row> = pool.install(|| {
        points
            .par_iter()
            .map(|x| {
                let golden = hyperboloid::golden_g(x);
                let bisect = solve_g_at(x, &focal, tol)?;
                let parametric = param.eval_g(x)?;
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let radial = (golden - hyperboloid::golden_g_1d(r)).abs();
                Ok(Row {
                    golden,
                    bisect,
                    parametric,
                    radial,
                })
            })
            .collect::<Result<_, equimid::Error>>()
    })?;

    let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
    for (k, name) in axis_names("x", n).into_iter().enumerate() {
        columns.push((name, points.iter().map(|x| x[k]).collect()));
    }
    columns.push(("G_golden".into(), rows.iter().map(|r| r.golden).collect()));
    columns.push(("G_bisect".into(), rows.iter().map(|r| r.bisect).collect()));
    columns.push((
        "G_parametric".into(),
        rows.iter().map(|r| r.parametric).collect(),
    ));
    columns.push((
        "err_bisect".into(),
        rows.iter().map(|r| (r.golden - r.bisect).abs()).collect(),
    ));
    columns.push((
        "err_parametric".into(),
        rows.iter()
            .map(|r| (r.golden - r.parametric).abs())
            .collect(),
    ));
    columns.push(("err_radial".into(), rows.iter().map(|r| r.radial).collect()));
    write_table(&Table::new(columns), args.format, &args.out)?;
    Ok(0)
}
