use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ncps::sweep::{render_csv, DEFAULT_STEPS};
use ncps::{
    acceptance, build_omega, covariance_for, nc_williamson_spectrum, run_sweep,
    transform_omega_ppt, Axis, Error, ErrorCategory, GammaFamily, ModeLayout, NcParams, Preset,
    StateParams, SweepSpec,
};

#[derive(Parser)]
#[command(
    name = "ncps",
    version,
    about = "Gaussian-state quantumness and separability in noncommutative phase space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one state as NONPHYSICAL, SEPARABLE or ENTANGLED.
    Classify(PointArgs),
    /// Print the full NC Williamson spectrum of one state.
    Spectrum {
        #[command(flatten)]
        point: PointArgs,
        /// Use the partially transposed structure matrix.
        #[arg(long)]
        transposed: bool,
    },
    /// Sweep a (theta, eta) grid and write CSV.
    Sweep(SweepArgs),
    /// Run the built-in acceptance checks.
    Selftest,
}

#[derive(Args)]
struct StateArgs {
    /// Correlation family (1 or 2).
    #[arg(long, default_value = "1")]
    family: GammaFamily,
    #[arg(long, allow_negative_numbers = true)]
    m: f64,
    /// Correlation parameter n.
    #[arg(long = "n", allow_negative_numbers = true)]
    n_corr: f64,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    eta: f64,
    #[command(flatten)]
    state: StateArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Figure preset (fig1..fig4); --out is then a directory.
    #[arg(long, conflicts_with_all = ["m", "n_corr", "theta_range", "eta_range"])]
    preset: Option<Preset>,
    #[arg(long, default_value = "1")]
    family: GammaFamily,
    #[arg(
        long,
        allow_negative_numbers = true,
        required_unless_present = "preset"
    )]
    m: Option<f64>,
    #[arg(
        long = "n",
        allow_negative_numbers = true,
        required_unless_present = "preset"
    )]
    n_corr: Option<f64>,
    /// MIN:MAX:STEPS
    #[arg(long, default_value_t = default_range())]
    theta_range: Axis,
    /// MIN:MAX:STEPS
    #[arg(long, default_value_t = default_range())]
    eta_range: Axis,
    /// Points per varying axis for presets.
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    /// Output file (or directory with --preset); stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn default_range() -> Axis {
    Axis::new(0.0, 0.6, DEFAULT_STEPS).expect("valid default axis")
}

enum Failure {
    Lib(Error),
    Selftest(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn io_error(path: &Path, source: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify(point) => cmd_classify(&point),
        Command::Spectrum { point, transposed } => cmd_spectrum(&point, transposed),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Selftest => cmd_selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Selftest(name)) => {
            eprintln!("selftest failed: {name}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.category() {
                ErrorCategory::Domain => 2,
                ErrorCategory::Numerics => 3,
                ErrorCategory::Io => 4,
            })
        }
    }
}

struct Point {
    family: GammaFamily,
    state: StateParams,
    params: NcParams,
}

fn point(args: &PointArgs) -> Result<Point, Error> {
    Ok(Point {
        family: args.state.family,
        params: NcParams::new(args.theta, args.eta)?,
        state: StateParams::new(args.state.m, args.state.n_corr)?,
    })
}

fn print_header(p: &Point) {
    println!("family={}", p.family);
    println!("theta={}", p.params.theta());
    println!("eta={}", p.params.eta());
    println!("m={}", p.state.m());
    println!("n={}", p.state.n_corr());
    println!("R={}", p.state.r());
    println!("b={}", p.state.b());
}

fn cmd_classify(args: &PointArgs) -> Result<(), Failure> {
    let p = point(args)?;
    let sigma = covariance_for(p.family, p.state)?;
    let omega = build_omega(p.params, ModeLayout::TWO_BY_TWO)?;
    let prime = transform_omega_ppt(&omega)?;
    let c = ncps::classify(&sigma, &omega, &prime)?;
    print_header(&p);
    println!("nu_minus={}", c.nu_minus);
    println!("nu_minus_prime={}", c.nu_minus_prime);
    println!("class={}", c.class);
    Ok(())
}

/// Twelve significant digits with trailing zeros trimmed.
fn short(v: f64) -> String {
    let rounded: f64 = format!("{v:.11e}").parse().expect("float");
    format!("{rounded}")
}

fn cmd_spectrum(args: &PointArgs, transposed: bool) -> Result<(), Failure> {
    let p = point(args)?;
    let sigma = covariance_for(p.family, p.state)?;
    let omega = build_omega(p.params, ModeLayout::TWO_BY_TWO)?;
    let structure = if transposed {
        transform_omega_ppt(&omega)?
    } else {
        omega
    };
    let spectrum = nc_williamson_spectrum(&sigma, &structure)?;
    print_header(&p);
    println!("structure={}", structure.kind());
    let values: Vec<String> = spectrum.values().iter().map(|&v| short(v)).collect();
    println!("spectrum={}", values.join(" "));
    println!("residual={:e}", spectrum.residual());
    Ok(())
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_error(path, e)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| io_error(Path::new("<stdout>"), e))
        }
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    if let Some(preset) = args.preset {
        let dir = args
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(preset.name()));
        fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
        for sweep in preset.sweeps(args.steps)? {
            let rows = run_sweep(&sweep.spec, args.jobs)?;
            let path = dir.join(format!("{}.csv", sweep.name));
            write_output(Some(&path), &render_csv(&rows))?;
            eprintln!("wrote {} ({} rows)", path.display(), rows.len());
        }
        return Ok(());
    }
    let (m, n_corr) = match (args.m, args.n_corr) {
        (Some(m), Some(n)) => (m, n),
        _ => return Err(Error::Domain("--m and --n are required without --preset".into()).into()),
    };
    let spec = SweepSpec {
        family: args.family,
        state: StateParams::new(m, n_corr)?,
        theta: args.theta_range,
        eta: args.eta_range,
    };
    let rows = run_sweep(&spec, args.jobs)?;
    write_output(args.out.as_deref(), &render_csv(&rows))?;
    Ok(())
}

fn cmd_selftest() -> Result<(), Failure> {
    let mut first_failure = None;
    let total = acceptance::CHECKS.len();
    let mut passed = 0;
    for check in &acceptance::CHECKS {
        let start = Instant::now();
        let outcome = check.run();
        eprintln!("check {:>2} took {:.2?}", check.id, start.elapsed());
        println!("{}", outcome.line());
        if outcome.passed {
            passed += 1;
        } else if first_failure.is_none() {
            first_failure = Some(format!("check {} ({})", outcome.id, outcome.name));
        }
    }
    match first_failure {
        None => {
            println!("selftest: PASS ({passed}/{total})");
            Ok(())
        }
        Some(name) => {
            println!("selftest: FAIL ({passed}/{total})");
            Err(Failure::Selftest(name))
        }
    }
}
