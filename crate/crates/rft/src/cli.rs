//! `rft` command line.
//!
//! Exit codes: 0 success, 1 validation failure or IO/data error, 2 the
//! expected-EC threshold left its high-threshold regime, 64 usage error or
//! invalid parameter.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rft_core::grid::white_noise;
use rft_core::rft::{bonferroni_threshold, poisson_clump_threshold, rft_threshold, ThresholdResult};
use rft_core::smoothing::{gaussian_kernel_1d, smooth_iterated, smoothness_params, Smoothness};
use rft_core::topology::{closed_form_intrinsic_volumes, lattice_intrinsic_volumes, BinaryMask, Shape};
use rft_core::{FieldSpec, Grid, IntrinsicVolumes, RngSeed};

use crate::config::{parse_dims, parse_list, read_config, SignalSource};
use crate::error::{Error, Result};
use crate::validate::{Options, Suite, Validator};

pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "rft", version, about = "Smooth random fields, excursion set topology and familywise thresholds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a simulated (optionally signal-bearing, smoothed) field as rfgrid.
    Simulate(SimulateArgs),
    /// Solve for a familywise-corrected threshold.
    Threshold(ThresholdArgs),
    /// Monte Carlo mean Euler characteristic curve as CSV.
    EcCurve(EcCurveArgs),
    /// Run the acceptance criteria and report PASS/FAIL for each.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Comma-separated grid dimensions, e.g. 101,101.
    #[arg(long)]
    dims: String,
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Kernel FWHM in length units; 0 writes unsmoothed noise.
    #[arg(long, default_value_t = 0.0)]
    fwhm: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_w: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// none, cos, key or file:PATH; added to the noise before smoothing.
    #[arg(long, default_value = "none")]
    signal: String,
    /// Number of smoothing passes.
    #[arg(long, default_value_t = 1)]
    iterations: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Gaussian,
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Ec,
    Bonferroni,
    Clump,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    /// Search region as a 2D rfgrid of 0/1 values.
    #[arg(long, group = "region")]
    mask: Option<PathBuf>,
    /// Search region: solid 3D ball of this radius.
    #[arg(long, group = "region")]
    ball: Option<f64>,
    /// Search region: box with these comma-separated sides (1 to 3).
    #[arg(long = "box", group = "region")]
    box_sides: Option<String>,
    #[arg(long, value_enum, default_value = "gaussian")]
    family: FamilyArg,
    /// F-field degrees of freedom as A,B.
    #[arg(long)]
    df: Option<String>,
    #[arg(long, conflicts_with = "lambda")]
    fwhm: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "ec")]
    method: MethodArg,
    /// Number of tests for the Bonferroni method.
    #[arg(long)]
    n_tests: Option<u64>,
    /// Mean clump size (in region measure units) for the clumping method.
    #[arg(long)]
    mean_clump: Option<f64>,
}

#[derive(Debug, Args)]
struct EcCurveArgs {
    /// key = value simulation config.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination, `-` for standard output.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Quick,
    Full,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value = "quick")]
    suite: SuiteArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    /// Negative control: use this λ for the expected EC in criteria 5 to 7.
    #[arg(long, hide = true)]
    inject_lambda: Option<f64>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(&a, stdout),
        Command::Threshold(a) => threshold(&a, stdout),
        Command::EcCurve(a) => ec_curve(&a, stdout),
        Command::Validate(a) => validate(&a, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "rft: {e}");
            e.exit_code()
        }
    }
}

fn out_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn simulate(a: &SimulateArgs, stdout: &mut dyn Write) -> Result<i32> {
    let grid = Grid::new(&parse_dims(&a.dims)?, a.delta)?;
    let mut field = white_noise(&grid, a.sigma_w, RngSeed::new(a.seed, 0))?;
    if let Some(signal) = SignalSource::parse(&a.signal)?.build(&grid)? {
        field = field.add(&signal)?;
    }
    if a.fwhm < 0.0 || !a.fwhm.is_finite() {
        return Err(Error::Usage(format!("--fwhm must be ≥ 0, got {}", a.fwhm)));
    }
    if a.fwhm > 0.0 {
        let kernel = gaussian_kernel_1d(&smoothness_params(Smoothness::Fwhm(a.fwhm))?, grid.delta())?;
        field = smooth_iterated(&field, &kernel, a.iterations)?;
    }
    crate::rfgrid::write_field(&a.out, &field)?;
    writeln!(stdout, "wrote {} ({} cells)", a.out.display(), grid.len()).map_err(out_err)?;
    Ok(0)
}

fn region(a: &ThresholdArgs) -> Result<Option<IntrinsicVolumes>> {
    if let Some(path) = &a.mask {
        return Ok(Some(mask_volumes(path)?));
    }
    if let Some(r) = a.ball {
        return Ok(Some(closed_form_intrinsic_volumes(&Shape::Ball(r))?));
    }
    if let Some(sides) = &a.box_sides {
        return Ok(Some(closed_form_intrinsic_volumes(&Shape::Box(parse_list(sides)?))?));
    }
    Ok(None)
}

fn mask_volumes(path: &Path) -> Result<IntrinsicVolumes> {
    let field = crate::rfgrid::read_field(path)?;
    if let Some(v) = field.values().iter().find(|&&v| v != 0.0 && v != 1.0) {
        return Err(Error::Format(format!("{}: mask values must be 0 or 1, found {v}", path.display())));
    }
    let bits = field.values().iter().map(|&v| v == 1.0).collect();
    Ok(lattice_intrinsic_volumes(&BinaryMask::new(*field.grid(), bits)?)?)
}

fn field_spec(a: &ThresholdArgs) -> Result<FieldSpec> {
    let lambda = match (a.lambda, a.fwhm) {
        (Some(l), _) => l,
        (None, Some(f)) => smoothness_params(Smoothness::Fwhm(f))?.lambda(),
        (None, None) => return Err(Error::Usage("--fwhm or --lambda is required".into())),
    };
    match a.family {
        FamilyArg::Gaussian => Ok(FieldSpec::gaussian(lambda)?),
        FamilyArg::F => {
            let df = a.df.as_deref().ok_or_else(|| Error::Usage("--family f needs --df A,B".into()))?;
            let parts: Vec<u32> = df
                .split(',')
                .map(|t| t.trim().parse().map_err(|_| Error::Usage(format!("bad degrees of freedom `{df}`"))))
                .collect::<Result<_>>()?;
            match parts.as_slice() {
                [alpha, beta] => Ok(FieldSpec::f(*alpha, *beta, lambda)?),
                _ => Err(Error::Usage(format!("--df needs two values, got `{df}`"))),
            }
        }
    }
}

fn threshold(a: &ThresholdArgs, stdout: &mut dyn Write) -> Result<i32> {
    let region = region(a)?;
    let need_region = || Error::Usage("this method needs --mask, --ball or --box".into());
    let mut lambda = None;
    let result: ThresholdResult = match a.method {
        MethodArg::Ec => {
            let iv = region.as_ref().ok_or_else(need_region)?;
            let spec = field_spec(a)?;
            lambda = Some(spec.lambda());
            rft_threshold(iv, &spec, a.alpha)?
        }
        MethodArg::Bonferroni => {
            let n = a.n_tests.ok_or_else(|| Error::Usage("--method bonferroni needs --n-tests".into()))?;
            bonferroni_threshold(a.alpha, n)?
        }
        MethodArg::Clump => {
            let iv = region.as_ref().ok_or_else(need_region)?;
            let clump = a.mean_clump.ok_or_else(|| Error::Usage("--method clump needs --mean-clump".into()))?;
            poisson_clump_threshold(iv.mu()[iv.dimension()], clump, a.alpha)?
        }
    };
    let mut report = String::new();
    let method = match a.method {
        MethodArg::Ec => "ec",
        MethodArg::Bonferroni => "bonferroni",
        MethodArg::Clump => "clump",
    };
    report.push_str(&format!("method={method}\nh={:.10}\nalpha_achieved={:.10}\n", result.h, result.alpha_achieved));
    if let Some(n) = a.n_tests.filter(|_| a.method == MethodArg::Bonferroni) {
        report.push_str(&format!("n_tests={n}\n"));
    }
    if let Some(iv) = &region {
        for (d, mu) in iv.mu().iter().enumerate() {
            report.push_str(&format!("mu{d}={mu}\n"));
        }
    }
    if let Some(l) = lambda {
        report.push_str(&format!("lambda={l:.10}\n"));
    }
    stdout.write_all(report.as_bytes()).map_err(out_err)?;
    Ok(0)
}

fn ec_curve(a: &EcCurveArgs, stdout: &mut dyn Write) -> Result<i32> {
    let config = read_config(&a.config)?;
    let summary = crate::parallel::with_threads(a.threads, || crate::parallel::run_replicates(&config))??;
    let expected = crate::table::null_expected_ec(&config)?;
    if a.out.as_os_str() == "-" {
        crate::table::write_ec_curve(stdout, &summary, &expected)?;
    } else {
        let file = std::fs::File::create(&a.out).map_err(|e| Error::io(&a.out, e))?;
        crate::table::write_ec_curve(std::io::BufWriter::new(file), &summary, &expected)?;
    }
    Ok(0)
}

fn validate(a: &ValidateArgs, stdout: &mut dyn Write) -> Result<i32> {
    let suite = match a.suite {
        SuiteArg::Quick => Suite::Quick,
        SuiteArg::Full => Suite::Full,
    };
    if a.threads == Some(0) {
        return Err(Error::Usage("--threads must be at least 1".into()));
    }
    let report = Validator::new(Options {
        suite,
        seed: a.seed,
        threads: a.threads,
        lambda_override: a.inject_lambda,
    })
    .run_all();
    stdout.write_all(report.render().as_bytes()).map_err(out_err)?;
    Ok(if report.passed() { 0 } else { EXIT_VALIDATION })
}
