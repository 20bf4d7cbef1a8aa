use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use circle_wigner::state::lambda_from_nome;
use circle_wigner::wigner::linspace;
use circle_wigner::{
    default_lambda_sweep, eval_grid, marginal_p, marginal_theta, normalize, uncertainty_curve, NormalizedState,
    QuadratureConfig, SeriesConfig, StateParams, Variant,
};

mod output;
mod verify;

use output::Format;

#[derive(Parser)]
#[command(
    name = "circle-wigner",
    version,
    about = "Circular Wigner functions of Gaussian-coefficient states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Wigner function on a (θ, p) grid
    Grid(GridArgs),
    /// p- or θ-marginal as an (x, value) series
    Marginal(MarginalArgs),
    /// ΔL, Δθ_full and Δθ_half over a log-spaced λ sweep
    Curve(CurveArgs),
    /// Run the built-in invariant suite
    Verify(VerifyArgs),
}

#[derive(Args)]
struct StateArgs {
    /// Gaussian width λ
    #[arg(long, conflicts_with = "q", allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Nome q = exp(−1/(2λ)), alternative to --lambda
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    l: i64,
    /// Fractional offset ε in [0, 1)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    eps: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta_bar: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when absent
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Quadrature tolerance
    #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Full,
    Half,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Full => Variant::Full,
            VariantArg::Half => Variant::Half,
        }
    }
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, value_enum, default_value_t = VariantArg::Full)]
    variant: VariantArg,
    #[arg(long, default_value_t = 101)]
    theta_points: usize,
    /// Lower p bound; defaults to l − 2
    #[arg(long, allow_negative_numbers = true)]
    p_min: Option<f64>,
    /// Upper p bound; defaults to l + 2
    #[arg(long, allow_negative_numbers = true)]
    p_max: Option<f64>,
    #[arg(long, default_value_t = 81)]
    p_points: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Axis {
    P,
    Theta,
}

#[derive(Args)]
struct MarginalArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, value_enum, default_value_t = VariantArg::Full)]
    variant: VariantArg,
    #[arg(long, value_enum, default_value_t = Axis::P)]
    axis: Axis,
    #[arg(long, default_value_t = 101)]
    theta_points: usize,
    #[arg(long, allow_negative_numbers = true)]
    p_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p_max: Option<f64>,
    #[arg(long, default_value_t = 81)]
    p_points: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    eps: f64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    l: i64,
    #[arg(long, default_value_t = 41)]
    lambda_points: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Tolerance for exact identities
    #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
    tol: f64,
}

/// Failure class, mapped to the process exit code.
enum Failure {
    Validation(anyhow::Error),
    Numerical(anyhow::Error),
}

impl From<circle_wigner::Error> for Failure {
    fn from(e: circle_wigner::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.into())
        } else {
            Failure::Validation(e.into())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Validation(e.into())
    }
}

fn invalid(flag: &str, detail: impl std::fmt::Display) -> Failure {
    Failure::Validation(anyhow!("invalid value for --{flag}: {detail}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Grid(args) => grid(args),
        Command::Marginal(args) => marginal(args),
        Command::Curve(args) => curve(args),
        Command::Verify(args) => {
            check_positive("tol", args.tol)?;
            if verify::run(args.tol, &mut io::stdout().lock())? {
                Ok(())
            } else {
                Err(Failure::Numerical(anyhow!("one or more checks failed")))
            }
        }
    }
}

fn grid(args: GridArgs) -> Result<(), Failure> {
    let state = build_state(&args.state)?;
    let cfg = quadrature(&args.out)?;
    let (p_min, p_max) = p_range(&args.state, args.p_min, args.p_max)?;
    check_count("theta-points", args.theta_points)?;
    check_count("p-points", args.p_points)?;
    let variant = args.variant.into();
    let grid = eval_grid(&state, variant, args.theta_points, p_min, p_max, args.p_points, &cfg)?;
    emit(&args.out, |w, format| output::write_grid(w, format, &grid))
}

fn marginal(args: MarginalArgs) -> Result<(), Failure> {
    let state = build_state(&args.state)?;
    quadrature(&args.out)?;
    let variant: Variant = args.variant.into();
    let points = match args.axis {
        Axis::P => {
            let (p_min, p_max) = p_range(&args.state, args.p_min, args.p_max)?;
            check_count("p-points", args.p_points)?;
            linspace(p_min, p_max, args.p_points)
                .into_iter()
                .map(|p| (p, marginal_p(&state, p, variant)))
                .collect::<Vec<_>>()
        }
        Axis::Theta => {
            check_count("theta-points", args.theta_points)?;
            linspace(-std::f64::consts::PI, std::f64::consts::PI, args.theta_points)
                .into_iter()
                .map(|t| Ok((t, marginal_theta(&state, t, variant)?)))
                .collect::<circle_wigner::Result<Vec<_>>>()?
        }
    };
    let axis = match args.axis {
        Axis::P => "p",
        Axis::Theta => "theta",
    };
    emit(&args.out, |w, format| {
        output::write_series(w, format, variant, state.params(), axis, &points)
    })
}

fn curve(args: CurveArgs) -> Result<(), Failure> {
    let cfg = quadrature(&args.out)?;
    check_eps(args.eps)?;
    check_count("lambda-points", args.lambda_points)?;
    let lambdas = default_lambda_sweep(args.lambda_points);
    let points = uncertainty_curve(args.eps, args.l, &lambdas, &SeriesConfig::default(), &cfg)?;
    emit(&args.out, |w, format| {
        output::write_curve(w, format, args.eps, args.l, &points)
    })
}

fn build_state(args: &StateArgs) -> Result<NormalizedState, Failure> {
    let lambda = match (args.lambda, args.q) {
        (Some(lambda), None) => {
            if !(lambda > 0.0 && lambda.is_finite()) {
                return Err(invalid("lambda", format!("must be positive and finite, got {lambda}")));
            }
            lambda
        }
        (None, Some(q)) => {
            if !(q > 0.0 && q < 1.0) {
                return Err(invalid("q", format!("must lie in (0, 1), got {q}")));
            }
            lambda_from_nome(q)
        }
        (None, None) => return Err(Failure::Validation(anyhow!("one of --lambda or --q is required"))),
        (Some(_), Some(_)) => return Err(Failure::Validation(anyhow!("--lambda and --q are mutually exclusive"))),
    };
    check_eps(args.eps)?;
    if !args.theta_bar.is_finite() {
        return Err(invalid("theta-bar", "must be finite"));
    }
    let params = StateParams::new(lambda, args.l, args.eps, args.theta_bar)?;
    Ok(normalize(params, &SeriesConfig::default())?)
}

fn check_eps(eps: f64) -> Result<(), Failure> {
    if !(0.0..1.0).contains(&eps) {
        return Err(invalid("eps", format!("must lie in [0, 1), got {eps}")));
    }
    Ok(())
}

fn check_positive(flag: &str, value: f64) -> Result<(), Failure> {
    if !(value > 0.0 && value.is_finite()) {
        return Err(invalid(flag, format!("must be positive and finite, got {value}")));
    }
    Ok(())
}

fn check_count(flag: &str, count: usize) -> Result<(), Failure> {
    if count < 2 {
        return Err(invalid(flag, format!("must be at least 2, got {count}")));
    }
    Ok(())
}

fn quadrature(out: &OutputArgs) -> Result<QuadratureConfig, Failure> {
    check_positive("tol", out.tol)?;
    Ok(QuadratureConfig::with_tolerance(out.tol)?)
}

fn p_range(state: &StateArgs, p_min: Option<f64>, p_max: Option<f64>) -> Result<(f64, f64), Failure> {
    let l = state.l as f64;
    let (lo, hi) = (p_min.unwrap_or(l - 2.0), p_max.unwrap_or(l + 2.0));
    if !lo.is_finite() {
        return Err(invalid("p-min", "must be finite"));
    }
    if !hi.is_finite() {
        return Err(invalid("p-max", "must be finite"));
    }
    if lo >= hi {
        return Err(invalid("p-min", format!("must be below --p-max, got {lo} >= {hi}")));
    }
    Ok((lo, hi))
}

fn emit<F>(out: &OutputArgs, write: F) -> Result<(), Failure>
where
    F: FnOnce(&mut dyn Write, Format) -> io::Result<()>,
{
    match &out.output {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))
                .map_err(Failure::Validation)?;
            let mut w = BufWriter::new(file);
            write(&mut w, out.format)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            write(&mut w, out.format)?;
            w.flush()?;
        }
    }
    Ok(())
}
