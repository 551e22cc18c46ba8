mod config;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use radial_qes::physical::{ModelKind, PhysicalModel};
use radial_qes::report::{self, Format};
use radial_qes::ritz::{Grid, DEFAULT_BASIS};
use radial_qes::{FixedParam, FreeParam, ModelParams};

#[derive(Parser, Debug)]
#[command(name = "radial-qes", version, about = "Truncation and variational spectra of the radial equation")]
#[command(args_override_self = true)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// key = value file of defaults; flags on the command line take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Truncation roots, energies and polynomial coefficients
    Truncate(TruncateArgs),
    /// Lowest variational eigenvalues at one parameter point
    Variational(VariationalArgs),
    /// Variational bands along one parameter axis
    Scan(ScanArgs),
    /// Points, curves and guide files for figure 1, 2 or 3
    Figure(FigureArgs),
    /// Run a verification suite; exits with status 1 on failure
    Check(CheckArgs),
    /// Oscillator-with-defect models in physical units
    Physical(PhysicalArgs),
}

impl Command {
    fn path(&self) -> Vec<&'static str> {
        match self {
            Command::Truncate(_) => vec!["truncate"],
            Command::Variational(_) => vec!["variational"],
            Command::Scan(_) => vec!["scan"],
            Command::Figure(_) => vec!["figure"],
            Command::Check(_) => vec!["check"],
            Command::Physical(p) => vec![
                "physical",
                match p.action {
                    PhysicalAction::AllowedFrequency(_) => "allowed-frequency",
                    PhysicalAction::ClaimedEnergy(_) => "claimed-energy",
                    PhysicalAction::Continuity(_) => "continuity",
                },
            ],
        }
    }
}

/// `a=<value>` or `b=<value>`.
fn parse_fixed(s: &str) -> std::result::Result<FixedParam, String> {
    let (name, value) = s.split_once('=').ok_or("expected a=<value> or b=<value>")?;
    let v: f64 = value.trim().parse().map_err(|e| format!("{value:?}: {e}"))?;
    match name.trim() {
        "a" => Ok(FixedParam::A(v)),
        "b" => Ok(FixedParam::B(v)),
        other => Err(format!("unknown parameter {other:?}, expected a or b")),
    }
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct TruncateArgs {
    /// Truncation order
    #[arg(long)]
    n: usize,
    /// Exponent s = |γ| >= 0
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    /// Fixed parameter, e.g. b=0 (roots in a) or a=0 (roots in b)
    #[arg(long, default_value = "b=0", value_parser = parse_fixed)]
    fix: FixedParam,
}

#[derive(Args, Debug, Clone, Copy)]
struct PointArgs {
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b: f64,
    /// Basis size
    #[arg(long, default_value_t = DEFAULT_BASIS)]
    basis: usize,
}

impl PointArgs {
    fn params(&self) -> Result<ModelParams> {
        Ok(ModelParams::from_s(self.s, self.a, self.b)?)
    }
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct VariationalArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Number of eigenvalues to print
    #[arg(long, default_value_t = 4)]
    count: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Axis {
    A,
    B,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ScanArgs {
    #[arg(long, value_enum)]
    axis: Axis,
    #[arg(long, allow_hyphen_values = true)]
    min: f64,
    #[arg(long, allow_hyphen_values = true)]
    max: f64,
    #[arg(long, default_value_t = 61)]
    points: usize,
    /// Number of bands, starting from ν = 0
    #[arg(long, default_value_t = 4)]
    bands: usize,
    #[command(flatten)]
    point: PointArgs,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct FigureArgs {
    /// Figure number
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    id: u8,
    /// Directory for the points, curves and guide files
    #[arg(long, default_value = ".")]
    dir: PathBuf,
    /// Curve grid size
    #[arg(long, default_value_t = 201)]
    points: usize,
    /// Lower end of the curve range (default: 1.05 times the extreme roots)
    #[arg(long, allow_hyphen_values = true, requires = "max")]
    min: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "min")]
    max: Option<f64>,
    /// Basis size of the curves (default depends on the figure)
    #[arg(long)]
    basis: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Hft,
    PointOnCurve,
    Oracle,
    Parity,
    Rootcount,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct CheckArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Highest truncation order (point-on-curve, parity, rootcount)
    #[arg(long, default_value_t = 10)]
    nmax: usize,
    /// Fixed parameter for point-on-curve
    #[arg(long, default_value = "b=0", value_parser = parse_fixed)]
    fix: FixedParam,
    /// Number of bands (hft, oracle)
    #[arg(long, default_value_t = 2)]
    bands: usize,
    /// Single parameter point for hft and oracle; oracle defaults to a built-in set
    #[arg(long, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    s: f64,
    #[arg(long, default_value_t = DEFAULT_BASIS)]
    basis: usize,
}

#[derive(Args, Debug)]
struct PhysicalArgs {
    #[command(subcommand)]
    action: PhysicalAction,
}

#[derive(Subcommand, Debug)]
enum PhysicalAction {
    /// Frequencies at which the order-n truncation condition holds
    AllowedFrequency(ModelArgs),
    /// Energy formula at the given frequency
    ClaimedEnergy(ModelArgs),
    /// Variational δ_ν over a frequency sweep
    Continuity(ContinuityArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum Model {
    CoulombHo,
    LinearHo,
    CoulombLinearHo,
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// Coulomb coupling
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    k: f64,
    /// Linear coupling
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    eta: f64,
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    /// Monopole parameter in (0, 1]
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    #[arg(long, default_value_t = 0)]
    l: u32,
    /// Truncation order (the radial label is n + 1)
    #[arg(long, default_value_t = 1)]
    n: usize,
}

impl ModelArgs {
    fn model(&self) -> PhysicalModel {
        PhysicalModel {
            kind: match self.model {
                Model::CoulombHo => ModelKind::CoulombHO,
                Model::LinearHo => ModelKind::LinearHO,
                Model::CoulombLinearHo => ModelKind::CoulombLinearHO,
            },
            m: self.m,
            omega: self.omega,
            k: self.k,
            eta: self.eta,
            alpha: self.alpha,
            hbar: self.hbar,
            l: self.l,
        }
    }
}

#[derive(Args, Debug)]
#[command(args_override_self = true)]
struct ContinuityArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0.1)]
    min: f64,
    #[arg(long, default_value_t = 2.0)]
    max: f64,
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long, default_value_t = 1)]
    bands: usize,
    #[arg(long, default_value_t = DEFAULT_BASIS)]
    basis: usize,
}

fn scan_grid(min: f64, max: f64, points: usize) -> Result<Grid> {
    if points < 2 {
        bail!("scans need at least 2 grid points, got {points}");
    }
    Ok(Grid::new(min, max, points)?)
}

fn band_count(bands: usize) -> Result<usize> {
    if bands == 0 {
        bail!("need at least one band");
    }
    Ok(bands - 1)
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Runs the command; `Ok(false)` means a check suite failed.
fn run(cli: &Cli) -> Result<bool> {
    let format: Format = cli.format.into();
    match &cli.command {
        Command::Truncate(a) => {
            emit(cli, &report::truncate_table(a.n, a.s, a.fix)?.render(format))?;
        }
        Command::Variational(a) => {
            let t = report::variational_table(&a.point.params()?, a.point.basis, a.count)?;
            emit(cli, &t.render(format))?;
        }
        Command::Scan(a) => {
            let axis = match a.axis {
                Axis::A => FreeParam::A,
                Axis::B => FreeParam::B,
            };
            let grid = scan_grid(a.min, a.max, a.points)?;
            let t = report::scan_table(&a.point.params()?, axis, grid, band_count(a.bands)?, a.point.basis)?;
            emit(cli, &t.render(format))?;
        }
        Command::Figure(a) => {
            let opts = report::FigureOptions {
                grid_points: a.points,
                range: a.min.zip(a.max),
                basis_n: a.basis,
            };
            if opts.grid_points < 2 {
                bail!("figure curves need at least 2 grid points");
            }
            let bundle = report::figure_bundle(a.id, &opts)?;
            fs::create_dir_all(&a.dir).with_context(|| format!("creating {}", a.dir.display()))?;
            let mut listing = String::new();
            for (name, contents) in bundle.files(format) {
                let path = a.dir.join(name);
                fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
                listing.push_str(&format!("{}\n", path.display()));
            }
            emit(cli, &listing)?;
        }
        Command::Check(a) => {
            let point = || ModelParams::from_s(a.s, a.a.unwrap_or(0.0), a.b.unwrap_or(0.0));
            let r = match a.suite {
                Suite::Hft => report::check_hft(&point()?, band_count(a.bands)?, a.basis)?,
                Suite::PointOnCurve => report::check_point_on_curve(a.nmax, a.s, a.fix, a.basis)?,
                Suite::Oracle => {
                    let cases = if a.a.is_some() || a.b.is_some() {
                        vec![point()?]
                    } else {
                        report::default_oracle_cases()
                    };
                    report::check_oracle(&cases, a.bands, a.basis)?
                }
                Suite::Parity => report::check_parity(a.nmax, a.s)?,
                Suite::Rootcount => report::check_rootcount(a.nmax, a.s)?,
            };
            emit(cli, &r.render(format))?;
            eprintln!("{}: {}", r.suite, if r.passed { "pass" } else { "FAIL" });
            return Ok(r.passed);
        }
        Command::Physical(p) => {
            let t = match &p.action {
                PhysicalAction::AllowedFrequency(m) => report::allowed_frequency_table(&m.model(), m.n)?,
                PhysicalAction::ClaimedEnergy(m) => report::claimed_energy_table(&m.model(), m.n)?,
                PhysicalAction::Continuity(c) => {
                    let grid = scan_grid(c.min, c.max, c.points)?;
                    report::continuity_report(&c.model.model(), grid, band_count(c.bands)?, c.basis)?
                }
            };
            emit(cli, &t.render(format))?;
        }
    }
    Ok(true)
}

/// Parse the command line, splicing in `--config` entries so that explicit
/// flags override them.
fn parse_cli() -> Result<Cli> {
    let argv: Vec<String> = std::env::args().collect();
    let first = Cli::parse_from(&argv);
    let Some(path) = &first.config else {
        return Ok(first);
    };
    let extra = config::config_args(path)?;
    let at = config::insertion_point(&argv, &first.command.path());
    let mut merged = argv[..at].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&argv[at..]);
    Cli::try_parse_from(&merged).map_err(|e| e.exit())
}

fn main() -> ExitCode {
    let result = parse_cli().and_then(|cli| run(&cli));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
