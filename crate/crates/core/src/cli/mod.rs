//! Command-line surface.
//!
//! Five subcommands: `spectrum`, `threshold`, `sweep`, `verify` and
//! `fit-exponent`. Tables are CSV with a leading `#` line that records the
//! tool version and the resolved parameters; numbers carry 12 significant
//! digits. Exit codes: 0 success, 2 invalid arguments, 3 solver failure,
//! 4 partial results (some sweep points or verification checks failed).

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::lattice::{build_hamiltonian, HoppingProfile, LatticeSpec};
use crate::phase::{
    default_gamma_max, find_gamma_c, fit_exponent, linear_grid, log_grid, sweep_phase_diagram, SweepFailure,
    SweepRecord, MIN_FIT_POINTS,
};
use crate::spectral::{eigenvalues, Classification};

mod output;
pub mod verify;

pub use output::{format_number, sweep_svg, SWEEP_COLUMNS};
pub use verify::{run_suite, Check, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_PARTIAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ptlattice", version, about = "Spectra and PT-breaking thresholds of tight-binding lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All eigenvalues of one lattice, classified real or complex.
    Spectrum(SpectrumArgs),
    /// Critical impurity strength of one lattice geometry.
    Threshold(ThresholdArgs),
    /// Thresholds over a (d, T_b) grid of two-segment lattices.
    Sweep(SweepArgs),
    /// Runs an invariant suite and reports each check.
    Verify(VerifyArgs),
    /// Power-law exponent of the threshold at small T_b.
    FitExponent(FitArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProfileKind {
    TwoSegment,
    Alpha,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GridKind {
    Log,
    Linear,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// Number of sites N.
    #[arg(long)]
    pub n: usize,
    /// Impurity site m (1 <= m <= N/2).
    #[arg(long, conflicts_with = "d")]
    pub m: Option<usize>,
    /// Inter-impurity distance d = N + 1 - 2m.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tb: f64,
    #[arg(long, value_enum, default_value_t = ProfileKind::TwoSegment)]
    pub profile: ProfileKind,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Custom profile: N - 1 lines, one positive decimal each.
    #[arg(long)]
    pub profile_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Upper bisection bracket; defaults to 2 max(t) N.
    #[arg(long)]
    pub gamma_max: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: usize,
    /// Comma-separated distances.
    #[arg(long, value_delimiter = ',', required = true)]
    pub d: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
    /// Explicit comma-separated t_b values; overrides the generated grid.
    #[arg(long, value_delimiter = ',')]
    pub tb: Vec<f64>,
    #[arg(long)]
    pub tb_min: Option<f64>,
    #[arg(long)]
    pub tb_max: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = GridKind::Log)]
    pub grid: GridKind,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a plot of Γ_c against T_b.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Required by the randomized suites.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub d: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
    #[arg(long, default_value_t = 0.05)]
    pub window_lo: f64,
    #[arg(long, default_value_t = 0.3)]
    pub window_hi: f64,
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Why a command stopped, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Solver { stage: &'static str, source: Error },
    Partial(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Solver { .. } => EXIT_SOLVER,
            Failure::Partial(_) => EXIT_PARTIAL,
        }
    }

    /// Input validation errors become usage failures; everything else is
    /// attributed to `stage`.
    fn from_error(stage: &'static str, e: Error) -> Self {
        match e {
            Error::InvalidLattice(_) | Error::InvalidProfile(_) | Error::InvalidArgument(_) | Error::Io(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Solver { stage, source: e },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(msg) => write!(f, "error: {msg}"),
            Failure::Solver { stage, source } => write!(f, "error: {stage} failed: {source}"),
            Failure::Partial(msg) => write!(f, "error: {msg}"),
        }
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (program name first) and runs the command. Tables go to
/// `--out` when given and to `stdout` otherwise; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a, stdout),
        Command::Threshold(a) => cmd_threshold(a, stdout, stderr),
        Command::Sweep(a) => cmd_sweep(a, stdout, stderr),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::FitExponent(a) => cmd_fit_exponent(a, stdout, stderr),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "{f}");
            f.exit_code()
        }
    }
}

fn header(command: &str, params: &[(&str, String)]) -> String {
    let mut line = format!("# ptlattice {} {command}", env!("CARGO_PKG_VERSION"));
    for (k, v) in params {
        let _ = write!(line, " {k}={v}");
    }
    line.push('\n');
    line
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> CmdResult {
    let written = match out {
        Some(path) => std::fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    };
    written.map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
}

fn check_positive(name: &str, x: f64) -> CmdResult {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--{name} must be a positive number, got {x}")))
    }
}

fn resolve_profile(args: &LatticeArgs) -> std::result::Result<HoppingProfile, Failure> {
    let usage = |e: Error| Failure::Usage(e.to_string());
    match args.profile {
        ProfileKind::TwoSegment => HoppingProfile::two_segment(args.t0, args.tb).map_err(usage),
        ProfileKind::Alpha => {
            let alpha = args.alpha.ok_or_else(|| Failure::Usage("--profile alpha needs --alpha".into()))?;
            HoppingProfile::alpha(args.t0, alpha).map_err(usage)
        }
        ProfileKind::Custom => {
            let path =
                args.profile_file.as_ref().ok_or_else(|| Failure::Usage("--profile custom needs --profile-file".into()))?;
            HoppingProfile::from_file(path)
                .map_err(|e| Failure::Usage(format!("profile file {}: {e}", path.display())))
        }
    }
}

fn resolve_spec(args: &LatticeArgs, gamma: f64) -> std::result::Result<LatticeSpec, Failure> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Failure::Usage(format!("--gamma must be non-negative, got {gamma}")));
    }
    let profile = resolve_profile(args)?;
    let n = args.n;
    let spec = match (args.m, args.d) {
        (Some(m), _) => {
            if m == 0 || m > n / 2 {
                return Err(Failure::Usage(format!("impurity site m = {m} violates 1 <= m <= N/2 = {}", n / 2)));
            }
            LatticeSpec::new(n, m, gamma, profile)
        }
        (None, Some(d)) => LatticeSpec::with_distance(n, d, gamma, profile),
        (None, None) => return Err(Failure::Usage("one of --m or --d is required".into())),
    };
    spec.map_err(|e| Failure::Usage(e.to_string()))
}

fn lattice_params(spec: &LatticeSpec, args: &LatticeArgs) -> Vec<(&'static str, String)> {
    let mut p = vec![
        ("n", spec.n_sites().to_string()),
        ("m", spec.impurity_site().to_string()),
        ("d", spec.distance().to_string()),
        ("profile", spec.profile().kind().to_string()),
    ];
    match spec.profile() {
        HoppingProfile::TwoSegment { t0, tb } => {
            p.push(("t0", t0.to_string()));
            p.push(("tb", tb.to_string()));
        }
        HoppingProfile::Alpha { t0, alpha } => {
            p.push(("t0", t0.to_string()));
            p.push(("alpha", alpha.to_string()));
        }
        HoppingProfile::Custom(_) => {
            let file = args.profile_file.as_ref().map(|f| f.display().to_string()).unwrap_or_default();
            p.push(("profile_file", file));
        }
    }
    p
}

/// Outer and inner reference hoppings for a table row: `(t0, t_b)` for
/// two-segment profiles, otherwise the profile's `t0` (or `t(1)`) and the
/// bond `t(m)` at the impurity.
fn reference_hoppings(spec: &LatticeSpec) -> (f64, f64) {
    match spec.two_segment() {
        Some(pair) => pair,
        None => {
            let t = spec.hopping();
            (spec.profile().t0().unwrap_or(t[0]), t[spec.impurity_site() - 1])
        }
    }
}

fn cmd_spectrum(args: &SpectrumArgs, stdout: &mut dyn Write) -> CmdResult {
    let spec = resolve_spec(&args.lattice, args.gamma)?;
    let h = build_hamiltonian(&spec);
    let spectrum = eigenvalues(&h).map_err(|e| Failure::from_error("eigenvalue solve", e))?;

    let mut params = lattice_params(&spec, &args.lattice);
    params.push(("gamma", args.gamma.to_string()));
    let mut text = header("spectrum", &params);
    text.push_str("index,re_E,im_E,classification,residual\n");
    for (i, ((e, class), r)) in
        spectrum.eigenvalues.iter().zip(&spectrum.classifications).zip(&spectrum.residuals).enumerate()
    {
        let class = match class {
            Classification::Real => "real",
            Classification::Complex => "complex",
        };
        let _ = writeln!(
            text,
            "{},{},{},{class},{}",
            i + 1,
            format_number(e.re),
            format_number(e.im),
            format_number(*r)
        );
    }
    let _ = writeln!(text, "# n_complex={}", spectrum.n_complex);
    emit(&text, args.out.as_deref(), stdout)
}

fn cmd_threshold(args: &ThresholdArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let spec = resolve_spec(&args.lattice, 0.0)?;
    let gamma_max = args.gamma_max.unwrap_or_else(|| default_gamma_max(&spec));
    check_positive("gamma-max", gamma_max)?;
    let threshold = find_gamma_c(&spec, gamma_max).map_err(|e| Failure::from_error("threshold search", e))?;

    let (t0, tb) = reference_hoppings(&spec);
    let record = SweepRecord {
        n_sites: spec.n_sites(),
        impurity_site: spec.impurity_site(),
        distance: spec.distance(),
        t0,
        tb,
        tb_ratio: tb / t0,
        gamma_c: threshold.gamma_c,
        gamma_c_ratio: threshold.gamma_c / t0,
        n_complex_above: threshold.n_complex_above,
        bracket_width: threshold.bracket_width(),
    };
    let mut params = lattice_params(&spec, &args.lattice);
    params.push(("gamma_max", gamma_max.to_string()));
    let mut text = header("threshold", &params);
    output::write_sweep_table(&mut text, &[Ok(&record)]);
    emit(&text, args.out.as_deref(), stdout)?;
    let _ = writeln!(
        stderr,
        "gamma_c = {}  Gamma_c = {}  bracket width = {}  n_complex_above = {}",
        format_number(record.gamma_c),
        format_number(record.gamma_c_ratio),
        format_number(record.bracket_width),
        record.n_complex_above
    );
    Ok(())
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

fn sweep_grid(args: &SweepArgs) -> std::result::Result<Vec<f64>, Failure> {
    let grid = if !args.tb.is_empty() {
        args.tb.clone()
    } else {
        let (Some(lo), Some(hi)) = (args.tb_min, args.tb_max) else {
            return Err(Failure::Usage("give --tb values or both --tb-min and --tb-max".into()));
        };
        check_positive("tb-min", lo)?;
        check_positive("tb-max", hi)?;
        if args.points == 0 {
            return Err(Failure::Usage("--points must be at least 1".into()));
        }
        match args.grid {
            GridKind::Log => log_grid(lo, hi, args.points),
            GridKind::Linear => linear_grid(lo, hi, args.points),
        }
    };
    if grid.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
        return Err(Failure::Usage("t_b grid must be strictly positive".into()));
    }
    if !strictly_increasing(&grid) {
        return Err(Failure::Usage("t_b grid must be strictly increasing".into()));
    }
    Ok(grid)
}

fn check_distances(d: &[usize]) -> CmdResult {
    if d.is_empty() {
        return Err(Failure::Usage("--d list is empty".into()));
    }
    let mut sorted = d.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Failure::Usage("--d list has duplicates".into()));
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    check_positive("t0", args.t0)?;
    check_distances(&args.d)?;
    let grid = sweep_grid(args)?;
    let outcome = sweep_phase_diagram(args.n, &args.d, &grid, args.t0).map_err(|e| Failure::from_error("sweep", e))?;

    let mut rows: Vec<std::result::Result<&SweepRecord, &SweepFailure>> =
        outcome.records.iter().map(Ok).chain(outcome.failures.iter().map(Err)).collect();
    let key = |r: &std::result::Result<&SweepRecord, &SweepFailure>| match r {
        Ok(r) => (r.distance, r.tb),
        Err(f) => (f.distance, f.tb),
    };
    rows.sort_by(|a, b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });

    let params = [
        ("n", args.n.to_string()),
        ("d", join(&args.d)),
        ("t0", args.t0.to_string()),
        ("tb", join(&grid)),
    ];
    let mut text = header("sweep", &params);
    output::write_sweep_table(&mut text, &rows);
    emit(&text, args.out.as_deref(), stdout)?;

    if let Some(path) = &args.svg {
        std::fs::write(path, sweep_svg(&outcome.records))
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        for f in &outcome.failures {
            let _ = writeln!(stderr, "sweep point d={} tb={} failed: {}", f.distance, f.tb, f.message);
        }
        Err(Failure::Partial(format!("{} of {} sweep points failed", outcome.failures.len(), rows.len())))
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_fit_exponent(args: &FitArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    check_positive("t0", args.t0)?;
    check_distances(&args.d)?;
    let (lo, hi) = (args.window_lo, args.window_hi);
    if !(lo > 0.0 && lo < hi && hi < 1.0) {
        return Err(Failure::Usage(format!("fit window [{lo}, {hi}] must lie inside (0, 1)")));
    }
    if args.points < MIN_FIT_POINTS {
        return Err(Failure::Usage(format!("--points must be at least {MIN_FIT_POINTS}")));
    }
    let grid: Vec<f64> = log_grid(lo, hi, args.points).into_iter().map(|x| x * args.t0).collect();
    let outcome = sweep_phase_diagram(args.n, &args.d, &grid, args.t0).map_err(|e| Failure::from_error("sweep", e))?;

    let params = [
        ("n", args.n.to_string()),
        ("d", join(&args.d)),
        ("t0", args.t0.to_string()),
        ("window_lo", lo.to_string()),
        ("window_hi", hi.to_string()),
        ("points", args.points.to_string()),
    ];
    let mut text = header("fit-exponent", &params);
    text.push_str("d,eta,stderr,window_lo,window_hi,n_points\n");
    let mut failed = 0;
    for &d in &args.d {
        let records: Vec<SweepRecord> = outcome.records.iter().filter(|r| r.distance == d).cloned().collect();
        match fit_exponent(&records, (lo, hi)) {
            Ok(fit) => {
                let _ = writeln!(
                    text,
                    "{d},{},{},{},{},{}",
                    format_number(fit.eta),
                    format_number(fit.stderr),
                    format_number(lo),
                    format_number(hi),
                    fit.points.len()
                );
            }
            Err(e) => {
                failed += 1;
                let _ = writeln!(text, "{d},,,{},{},{}", format_number(lo), format_number(hi), records.len());
                let _ = writeln!(stderr, "fit for d={d} failed: {e}");
            }
        }
    }
    for f in &outcome.failures {
        let _ = writeln!(stderr, "sweep point d={} tb={} failed: {}", f.distance, f.tb, f.message);
    }
    emit(&text, args.out.as_deref(), stdout)?;
    if failed > 0 || !outcome.failures.is_empty() {
        return Err(Failure::Partial(format!(
            "{failed} fits and {} sweep points failed",
            outcome.failures.len()
        )));
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> CmdResult {
    if args.suite.is_randomized() && args.seed.is_none() {
        return Err(Failure::Usage(format!("suite {} is randomized and needs --seed", args.suite.name())));
    }
    let checks = run_suite(args.suite, args.seed.unwrap_or(0)).map_err(|e| Failure::from_error("verification", e))?;

    let mut params = vec![("suite", args.suite.name().to_string())];
    if let Some(seed) = args.seed {
        params.push(("seed", seed.to_string()));
    }
    let mut text = header("verify", &params);
    for c in &checks {
        let _ = writeln!(text, "{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(text, "# {} checks, {} passed, {failed} failed", checks.len(), checks.len() - failed);
    emit(&text, args.out.as_deref(), stdout)?;
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Partial(format!("{failed} verification checks failed")))
    }
}
