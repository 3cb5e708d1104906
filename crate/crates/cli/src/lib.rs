//! Command-line front end: `osm <subcommand> [flags]`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use osm_core::optimizer::{
    asymptotic_params, constant_kinf, constant_kj, equioscillation_report, max_rho, numeric_minmax,
    OptimizationScope, OptimizedChoice,
};
use osm_core::pde::{solve_case, ParamSource, SolverMode, SweepOptions, SweepRow};
use osm_core::report::{
    fit_slope, read_csv, write_csv, write_json, ConstantRow, CsvRecord, OptimizeRecord, SpectrumRow,
};
use osm_core::spectral::{convergence_curve, rho_highfreq};
use osm_core::symbol::{frequency_grid, Family, FrequencyGrid, ProblemParams};
use osm_core::OsmError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "osm", version, about = "Optimized Schwarz analysis and solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Transmission parameters for one family, as JSON.
    Optimize(OptimizeArgs),
    /// Convergence curve `k,rho,rho_hf` as CSV.
    Spectrum(OptimizeArgs),
    /// One discrete solve with the overlap from the config.
    Solve(SolveArgs),
    /// Iteration counts over mesh sizes, with overlap 2h.
    #[command(name = "sweep-h")]
    SweepH(SweepHArgs),
    /// Iteration counts over subdomain counts, with overlap 2h.
    #[command(name = "sweep-J")]
    SweepJ(SweepJArgs),
    /// Log-log slope of a sweep table or of explicit points.
    #[command(name = "fit-slope")]
    FitSlope(FitArgs),
    /// The constants K_J and their limit.
    Kconstants(KArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Problem parameters as JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Source {
    Asymptotic,
    Numeric,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Stationary,
    Gmres,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Layout {
    FixedWidth,
    FixedGlobal,
}

#[derive(Debug, Args)]
struct ParamArgs {
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// `2`, `J`, `J=<n>` or `inf`.
    #[arg(long, default_value = "J", value_parser = parse_scope)]
    scope: OptimizationScope,
    #[arg(long, value_enum, default_value = "asymptotic")]
    source: Source,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    params: ParamArgs,
    /// Mesh size fixing the frequency grid; defaults to half the overlap.
    #[arg(long, value_parser = parse_real)]
    h: Option<f64>,
}

#[derive(Debug, Args)]
struct SolverArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value = "stationary")]
    mode: Mode,
    #[arg(long, value_parser = parse_real)]
    tol: Option<f64>,
    #[arg(long)]
    itmax: Option<usize>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_parser = parse_real)]
    h: f64,
}

#[derive(Debug, Args)]
struct SweepHArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    solver: SolverArgs,
    /// Comma-separated mesh sizes, e.g. `1/50,1/100`.
    #[arg(long, value_parser = parse_real, value_delimiter = ',', required = true)]
    h: Vec<f64>,
}

#[derive(Debug, Args)]
struct SweepJArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long = "J", value_delimiter = ',', required = true)]
    js: Vec<usize>,
    #[arg(long, value_parser = parse_real)]
    h: f64,
    #[arg(long, value_enum, default_value = "fixed-width")]
    layout: Layout,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Sweep CSV to fit; iterations against `--x`.
    #[arg(long, conflicts_with = "points", required_unless_present = "points")]
    input: Option<PathBuf>,
    /// Explicit points `x:y,x:y,...`.
    #[arg(long, value_delimiter = ',', value_parser = parse_point)]
    points: Vec<(f64, f64)>,
    #[arg(long, value_enum, default_value = "h")]
    x: XColumn,
    /// Keep only rows of this family.
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum XColumn {
    H,
    #[value(name = "J")]
    J,
}

#[derive(Debug, Args)]
struct KArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "J", value_delimiter = ',', required = true)]
    js: Vec<usize>,
}

/// Accepts decimals and `a/b` fractions.
fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let v = match t.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad number '{t}'"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad number '{t}'"))?;
            a / b
        }
        None => t.parse().map_err(|_| format!("bad number '{t}'"))?,
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got '{t}'"))
    }
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (x, y) = s.split_once(':').ok_or_else(|| format!("expected x:y, got '{s}'"))?;
    Ok((parse_real(x)?, parse_real(y)?))
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: OsmError| e.to_string())
}

fn parse_scope(s: &str) -> Result<OptimizationScope, String> {
    s.parse().map_err(|e: OsmError| e.to_string())
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Diverged(String),
    Failure(String),
}

impl From<OsmError> for CliError {
    fn from(e: OsmError) -> Self {
        match e {
            OsmError::SingularLocal { .. }
            | OsmError::SingularDenominator { .. }
            | OsmError::EigenNoConvergence { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut io::stdout().lock(), &mut io::stderr().lock())
}

/// As [`run`], writing to the given streams instead of the process ones.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(CliError::Config(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_CONFIG
        }
        Err(CliError::Diverged(m)) => {
            let _ = writeln!(stderr, "diverged: {m}");
            EXIT_DIVERGED
        }
        Err(CliError::Failure(m)) => {
            let _ = writeln!(stderr, "error: {m}");
            EXIT_FAILURE
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Optimize(a) => optimize(a, stdout),
        Command::Spectrum(a) => spectrum(a, stdout),
        Command::Solve(a) => solve(a, stdout),
        Command::SweepH(a) => sweep_h(a, stdout),
        Command::SweepJ(a) => sweep_j(a, stdout),
        Command::FitSlope(a) => fit(a, stdout),
        Command::Kconstants(a) => kconstants(a, stdout),
    }
}

fn load_config(path: Option<&Path>) -> CliResult<ProblemParams> {
    let pp = match path {
        Some(p) => {
            let file = File::open(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            let pp: ProblemParams = osm_core::report::read_json(io::BufReader::new(file))?;
            pp
        }
        None => ProblemParams::new(1.0, 1.0, 1.0, 1.0, 4, 0.02)?,
    };
    pp.validate()?;
    if pp.outer_bc != osm_core::OuterBc::Dirichlet {
        return Err(CliError::Config("only Dirichlet outer boundaries are supported".into()));
    }
    Ok(pp)
}

fn emit(out: Option<&Path>, stdout: &mut dyn Write, body: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => body(stdout),
    }
}

fn emit_csv<T: CsvRecord>(rows: &[T], out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    emit(out, stdout, |w| Ok(write_csv(rows, w)?))
}

fn emit_json<T: serde::Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    emit(out, stdout, |w| {
        write_json(value, &mut *w)?;
        writeln!(w)?;
        Ok(())
    })
}

fn resolve_scope(scope: OptimizationScope, pp: &ProblemParams) -> OptimizationScope {
    match scope {
        OptimizationScope::FiniteJ(0) => OptimizationScope::FiniteJ(pp.j),
        s => s,
    }
}

fn frequency_grid_for(pp: &ProblemParams, h: Option<f64>) -> CliResult<FrequencyGrid> {
    Ok(frequency_grid(pp, h.unwrap_or(pp.delta / 2.0))?)
}

fn choose(params: &ParamArgs, pp: &ProblemParams, grid: &FrequencyGrid) -> CliResult<OptimizedChoice> {
    if params.family == Family::Dirichlet {
        return Err(CliError::Config("classical Schwarz has no parameters to optimize".into()));
    }
    let choice = match params.source {
        Source::Numeric => numeric_minmax(params.family, pp, grid)?,
        Source::Asymptotic => {
            let mut c = asymptotic_params(params.family, resolve_scope(params.scope, pp), pp, pp.delta)?;
            c.maxima = equioscillation_report(&c.params, pp, grid);
            c.numeric_rho = Some(max_rho(pp, &c.params, grid));
            c
        }
    };
    Ok(choice)
}

fn optimize(a: OptimizeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let pp = load_config(a.common.config.as_deref())?;
    let grid = frequency_grid_for(&pp, a.h)?;
    let choice = choose(&a.params, &pp, &grid)?;
    emit_json(&OptimizeRecord::from(&choice), a.common.out.as_deref(), stdout)
}

fn spectrum(a: OptimizeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let pp = load_config(a.common.config.as_deref())?;
    let grid = frequency_grid_for(&pp, a.h)?;
    let choice = choose(&a.params, &pp, &grid)?;
    let curve = convergence_curve(&pp, &choice.params, &grid)?;
    let rows: Vec<SpectrumRow> = curve
        .points
        .iter()
        .map(|&(k, rho)| SpectrumRow {
            k,
            rho,
            rho_hf: rho_highfreq(k, &pp, &choice.params),
        })
        .collect();
    emit_csv(&rows, a.common.out.as_deref(), stdout)
}

fn sweep_options(s: &SolverArgs, seed: Option<u64>) -> SweepOptions {
    let mut opts = SweepOptions {
        mode: match s.mode {
            Mode::Stationary => SolverMode::Stationary,
            Mode::Gmres => SolverMode::Gmres,
        },
        source: match s.params.source {
            Source::Numeric => ParamSource::Numeric,
            Source::Asymptotic => ParamSource::Asymptotic(s.params.scope),
        },
        itmax: s.itmax,
        ..Default::default()
    };
    if let Some(tol) = s.tol {
        opts.tol = tol;
    }
    if let Some(seed) = seed {
        opts.seed = seed;
    }
    opts
}

/// Runs every case, then writes the table. Divergence is reported after
/// the table so partial results are kept.
fn run_cases(
    cases: Vec<(ProblemParams, f64)>,
    family: Family,
    opts: &SweepOptions,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let mut rows: Vec<SweepRow> = Vec::with_capacity(cases.len());
    let mut diverged = Vec::new();
    for (pp, h) in cases {
        let (row, report) = solve_case(&pp, family, h, opts)?;
        if report.diverged {
            diverged.push(format!("h={} J={}", row.h, row.j));
        }
        rows.push(row);
    }
    emit_csv(&rows, out, stdout)?;
    if diverged.is_empty() {
        Ok(())
    } else {
        Err(CliError::Diverged(diverged.join(", ")))
    }
}

fn solve(a: SolveArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let pp = load_config(a.common.config.as_deref())?;
    let opts = sweep_options(&a.solver, a.common.seed);
    run_cases(vec![(pp, a.h)], a.solver.params.family, &opts, a.common.out.as_deref(), stdout)
}

fn sweep_h(a: SweepHArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let pp = load_config(a.common.config.as_deref())?;
    let opts = sweep_options(&a.solver, a.common.seed);
    let cases = a
        .h
        .iter()
        .map(|&h| Ok((pp.with_delta(2.0 * h)?, h)))
        .collect::<CliResult<Vec<_>>>()?;
    run_cases(cases, a.solver.params.family, &opts, a.common.out.as_deref(), stdout)
}

fn sweep_j(a: SweepJArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let pp = load_config(a.common.config.as_deref())?;
    let opts = sweep_options(&a.solver, a.common.seed);
    let global = pp.l * pp.j as f64;
    let cases = a
        .js
        .iter()
        .map(|&j| {
            let mut p = pp.with_subdomains(j)?;
            if let Layout::FixedGlobal = a.layout {
                p = p.with_width(global / j as f64)?;
            }
            Ok((p.with_delta(2.0 * a.h)?, a.h))
        })
        .collect::<CliResult<Vec<_>>>()?;
    run_cases(cases, a.solver.params.family, &opts, a.common.out.as_deref(), stdout)
}

fn fit(a: FitArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let points = match &a.input {
        Some(path) => {
            let file = File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let rows: Vec<SweepRow> = read_csv(io::BufReader::new(file))?;
            rows.iter()
                .filter(|r| a.family.map_or(true, |f| f == r.family))
                .map(|r| {
                    let x = match a.x {
                        XColumn::H => r.h,
                        XColumn::J => r.j as f64,
                    };
                    (x, r.iterations as f64)
                })
                .collect()
        }
        None => a.points.clone(),
    };
    let fit = fit_slope(&points)?;
    emit_json(&fit, a.out.as_deref(), stdout)
}

fn kconstants(a: KArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let pp = load_config(a.common.config.as_deref())?;
    if let Some(&j) = a.js.iter().find(|&&j| j < 2) {
        return Err(CliError::Config(format!("J must be at least 2, got {j}")));
    }
    let k_inf = constant_kinf(&pp);
    let rows: Vec<ConstantRow> = a
        .js
        .iter()
        .map(|&j| ConstantRow {
            j,
            k_j: constant_kj(&pp, j),
            k_inf,
        })
        .collect();
    emit_csv(&rows, a.common.out.as_deref(), stdout)
}
