//! The `regdae` command line.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 numerical refusal,
//! 3 verification failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use regdae::asymptotics::{classify_factorized, split_subspaces};
use regdae::consistent_iv::{compute_iv, iv_membership, iv_structure_predicates, IvSpace};
use regdae::io::{self as rio, complex_list, matrix_value, real_value};
use regdae::laplace::{transform_residual_with, LaplaceConfig, DEFAULT_FREQUENCIES};
use regdae::linalg::{self, CVector};
use regdae::pencil::{block_factorize_with, generate_regular, is_regular_with, BlockFactorization, Pencil};
use regdae::solvers::{
    attainment_residual, integrated_identity_residuals, iv_invariance_residual, mild_constraint_residual,
    solve_mild, solve_strong, strong_residual, uniform_grid, MildSolver, Trajectory, DEFAULT_QUAD_TOL,
    STRONG_IV_TOL,
};
use regdae::subspaces::default_rank_tol;
use regdae::verify::{self, Suite, VerifyOptions};
use regdae::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_REFUSED: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "regdae", version, about = "Regular index-0 DAEs M0 u' + M1 u = 0")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regularity, IV space, blocks and spectra of a pencil
    Analyze(AnalyzeArgs),
    /// Finite spectrum of a regular pencil
    Spectrum(AnalyzeArgs),
    /// Strong or mild solution on a uniform grid
    Solve(SolveArgs),
    /// Stability verdict and dichotomy splitting
    Stability(StabilityArgs),
    /// Check the Fourier-Laplace representation of a mild solution
    Laplace(LaplaceArgs),
    /// Run the randomized property suites
    Verify(VerifyArgs),
    /// Write a random regular pencil
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Strong,
    Mild,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Pencil JSON file (`-` for stdin)
    #[arg(long)]
    pub input: PathBuf,
    /// Relative cutoff for the numerical rank of M0 [default: 1e2 * n * eps]
    #[arg(long)]
    pub tol_rank: Option<f64>,
    /// Relative regularity threshold on sigma_min(B) / |M1|
    #[arg(long, default_value_t = regdae::pencil::DEFAULT_REGULARITY_TOL)]
    pub tol_regularity: f64,
    /// Output file [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// `iv-basis-K`, `random`, or the entries as a JSON array or comma list
    #[arg(long, allow_hyphen_values = true)]
    pub u0: String,
    #[arg(long, default_value_t = 5.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    #[arg(long, value_enum, default_value = "mild")]
    pub mode: Mode,
    /// Seed for `--u0 random`
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub common: Common,
    /// Distance to the imaginary axis below which eigenvalues count as on it [default: 1e-8 * |A|]
    #[arg(long)]
    pub tol_margin: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct LaplaceArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub u0: String,
    /// Exponential weight [default: max(s0, 0) + 1]
    #[arg(long)]
    pub rho: Option<f64>,
    /// Frequencies, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub frequencies: Option<Vec<f64>>,
    #[arg(long, default_value_t = regdae::laplace::DEFAULT_QUAD_TOL)]
    pub quad_tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = verify::DEFAULT_SEED)]
    pub seed: u64,
    /// Size of the main instance family
    #[arg(long, default_value_t = verify::DEFAULT_COUNT)]
    pub count: usize,
    /// Run only these suites (repeatable)
    #[arg(long)]
    pub only: Vec<Suite>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Corrupt the spectrum check so the suite fails
    #[cfg(any(test, feature = "fault-injection"))]
    #[arg(long)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub rank: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Prescribed finite spectrum as a JSON array, e.g. `[-1, [0.5, 2]]`
    #[arg(long, allow_hyphen_values = true)]
    pub spectrum: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(Error),
    VerificationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_REFUSED,
            CliError::VerificationFailed => EXIT_VERIFY_FAILED,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Numerical(e) => write!(f, "{e}"),
            CliError::VerificationFailed => f.write_str("verification failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NonSquare { .. }
            | Error::DimensionMismatch(_)
            | Error::NonFinite(_)
            | Error::BadRank { .. }
            | Error::BadSpectrumHint { .. }
            | Error::InvalidArgument(_) => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl From<rio::ParseError> for CliError {
    fn from(e: rio::ParseError) -> Self {
        CliError::Usage(format!("parse error at {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Reports go to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match cmd {
        Command::Analyze(a) => cmd_analyze(&a, stdout),
        Command::Spectrum(a) => cmd_spectrum(&a, stdout),
        Command::Solve(a) => cmd_solve(&a, stdout, stderr),
        Command::Stability(a) => cmd_stability(&a, stdout),
        Command::Laplace(a) => cmd_laplace(&a, stdout),
        Command::Verify(a) => cmd_verify(&a, stdout),
        Command::Generate(a) => cmd_generate(&a, stdout),
    }
}

fn read_input(path: &Path) -> CliResult<String> {
    if path == Path::new("-") {
        io::read_to_string(io::stdin()).map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
    }
}

fn load_pencil(c: &Common) -> CliResult<Pencil> {
    Ok(rio::parse_pencil(&read_input(&c.input)?)?)
}

fn rank_tol(c: &Common, p: &Pencil) -> f64 {
    c.tol_rank.unwrap_or_else(|| default_rank_tol(p.n()))
}

fn factorize(c: &Common, p: &Pencil) -> CliResult<(BlockFactorization, IvSpace)> {
    let f = block_factorize_with(p, rank_tol(c, p), c.tol_regularity)?;
    let iv = compute_iv(&f)?;
    Ok((f, iv))
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Usage(format!("cannot write output: {e}"))),
    }
}

fn emit_json(out: &Option<PathBuf>, stdout: &mut dyn Write, v: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v).expect("JSON values serialize");
    text.push('\n');
    emit(out, stdout, &text)
}

/// Renders a flat JSON object as `key: value` lines.
fn as_text(v: &Value) -> String {
    let mut s = String::new();
    if let Value::Object(map) = v {
        for (k, x) in map {
            s.push_str(&format!("{k}: {x}\n"));
        }
    }
    s
}

fn emit_report(out: &Option<PathBuf>, stdout: &mut dyn Write, format: Format, v: &Value) -> CliResult<()> {
    match format {
        Format::Json => emit_json(out, stdout, v),
        Format::Text => emit(out, stdout, &as_text(v)),
        Format::Csv => Err(CliError::Usage("csv output is only available for `solve`".into())),
    }
}

fn spectrum_json(eigs: &[num_complex::Complex64]) -> Value {
    let rep = regdae::pencil::SpectrumReport::from_eigenvalues(eigs.to_vec());
    json!({
        "eigenvalues": complex_list(&rep.eigenvalues),
        "spectral_abscissa": real_value(rep.spectral_abscissa),
        "s0": real_value(rep.s0),
        "imag_axis_margin": real_value(rep.imag_axis_margin),
        "empty_spectrum": rep.is_empty(),
    })
}

fn cmd_analyze(a: &AnalyzeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let p = load_pencil(&a.common)?;
    let rtol = rank_tol(&a.common, &p);
    let reg = is_regular_with(&p, rtol, a.common.tol_regularity);
    let mut report = json!({
        "n": p.n(),
        "regular": reg.regular,
        "criterion": reg.criterion,
        "rank_m0": reg.rank_m0,
        "sigma_min_b": real_value(reg.sigma_min_b),
        "regularity_threshold": real_value(reg.threshold),
        "note": reg.note,
        "tolerances": {"rank": rtol, "regularity": a.common.tol_regularity},
    });
    if reg.regular {
        let (f, iv) = factorize(&a.common, &p)?;
        let spec = f.spectrum()?;
        let mut sigma_iv = linalg::eigenvalues(&-&iv.generator_g).ok_or(Error::EigenFailure)?;
        regdae::pencil::sort_spectrum(&mut sigma_iv);
        let preds = iv_structure_predicates(&f, a.common.tol_regularity);
        let extra = json!({
            "dim_iv": iv.dim(),
            "iv_basis": matrix_value(iv.basis.basis()),
            "b": matrix_value(&f.b),
            "c": matrix_value(&f.c),
            "reduced_generator_a": matrix_value(&f.reduced_generator_a),
            "generator_g": matrix_value(&iv.generator_g),
            "spectrum": complex_list(&spec.eigenvalues),
            "spectrum_iv": complex_list(&sigma_iv),
            "spectral_equality_residual": real_value(linalg::matching_distance(&spec.eigenvalues, &sigma_iv)),
            "m0_iv_condition": real_value(iv.m0_iv_condition),
            "empty_spectrum": spec.is_empty(),
            "nbot_subset_iv": preds.nbot_subset_iv,
            "iv_meets_nbot_trivially": preds.iv_meets_nbot_trivially,
        });
        if let (Value::Object(r), Value::Object(e)) = (&mut report, extra) {
            r.extend(e);
        }
    }
    emit_report(&a.common.out, stdout, a.format, &report)
}

fn cmd_spectrum(a: &AnalyzeArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let p = load_pencil(&a.common)?;
    let (f, _) = factorize(&a.common, &p)?;
    let spec = f.spectrum()?;
    emit_report(&a.common.out, stdout, a.format, &spectrum_json(&spec.eigenvalues))
}

/// `iv-basis-K`, `random`, a JSON array or a comma-separated list of reals.
fn parse_u0(spec: &str, iv: &IvSpace, seed: u64) -> CliResult<CVector> {
    let n = iv.ambient_dim();
    let v = if let Some(k) = spec.strip_prefix("iv-basis-") {
        let k: usize = k.parse().map_err(|_| CliError::Usage(format!("bad basis index in `{spec}`")))?;
        if k >= iv.dim() {
            return Err(CliError::Usage(format!("IV has dimension {}, no basis vector {k}", iv.dim())));
        }
        iv.basis.basis().column(k).into_owned()
    } else if spec == "random" {
        verify::random_unit_vector(seed, n)
    } else if spec.trim_start().starts_with('[') {
        rio::parse_vector(spec)?
    } else {
        let entries = spec
            .split(',')
            .map(|x| x.trim().parse::<f64>().map(|r| linalg::c64(r, 0.0)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| CliError::Usage(format!("cannot parse initial value `{spec}`")))?;
        CVector::from_vec(entries)
    };
    if v.len() != n {
        return Err(CliError::Usage(format!("initial value has {} entries, the pencil has size {n}", v.len())));
    }
    Ok(v)
}

fn trajectory_json(t: &Trajectory) -> Value {
    json!({
        "times": t.times,
        "states": t.states.iter().map(rio::vector_value).collect::<Vec<_>>(),
    })
}

fn cmd_solve(a: &SolveArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    if !(a.t_max > 0.0) || a.grid < 2 {
        return Err(CliError::Usage("need --t-max > 0 and --grid >= 2".into()));
    }
    let p = load_pencil(&a.common)?;
    let (f, iv) = factorize(&a.common, &p)?;
    let u0 = parse_u0(&a.u0, &iv, a.seed)?;
    let times = uniform_grid(a.t_max, a.grid)?;
    let (traj, mut summary) = match a.mode {
        Mode::Strong => {
            let traj = solve_strong(&iv, &u0, &times)?;
            let summary = json!({
                "mode": "strong",
                "equation_residual_relative": real_value(strong_residual(&p, &iv, &traj)?),
                "iv_distance_relative": real_value(iv_invariance_residual(&iv, &traj)),
                "iv_tolerance": STRONG_IV_TOL,
            });
            (traj, summary)
        }
        Mode::Mild => {
            let traj = solve_mild(&f, &iv, &u0, &times)?;
            let solver = MildSolver::new(&f, &iv)?;
            let identity =
                integrated_identity_residuals(&p, &solver, &regdae::solvers::column(&u0), &times, DEFAULT_QUAD_TOL)?[0];
            let jump = traj.jump.as_ref().expect("mild trajectories record the jump");
            let summary = json!({
                "mode": "mild",
                "u0_in_iv": iv_membership(&iv, &u0, STRONG_IV_TOL)?,
                "jump": {
                    "u0_given": rio::vector_value(&jump.u0_given),
                    "u0_plus": rio::vector_value(&jump.u0_plus),
                    "size": jump.size(),
                },
                "integrated_identity_residual": real_value(identity),
                "attainment_residual": real_value(attainment_residual(&p, &traj)),
                "constraint_residual_relative": real_value(mild_constraint_residual(&iv, &traj)),
                "quad_tol": DEFAULT_QUAD_TOL,
            });
            (traj, summary)
        }
    };
    summary["t_max"] = json!(a.t_max);
    summary["grid"] = json!(a.grid);
    summary["max_norm"] = real_value(traj.max_norm());
    match a.format {
        Format::Csv => {
            let mut buf = Vec::new();
            rio::write_trajectory_csv(&traj, &mut buf).expect("writing to memory");
            let csv = String::from_utf8(buf).expect("ASCII output");
            emit(&a.common.out, stdout, &csv)?;
            let text = serde_json::to_string_pretty(&summary).expect("JSON values serialize");
            // summary goes wherever the CSV is not
            let sink: &mut dyn Write = if a.common.out.is_some() { stdout } else { stderr };
            writeln!(sink, "{text}").map_err(|e| CliError::Usage(format!("cannot write output: {e}")))
        }
        Format::Json => {
            summary["trajectory"] = trajectory_json(&traj);
            emit_json(&a.common.out, stdout, &summary)
        }
        Format::Text => emit(&a.common.out, stdout, &as_text(&summary)),
    }
}

fn cmd_stability(a: &StabilityArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let p = load_pencil(&a.common)?;
    let (f, iv) = factorize(&a.common, &p)?;
    let report = classify_factorized(&f, &iv, a.tol_margin)?;
    let mut v = json!({
        "verdict": report.verdict.as_str(),
        "spectrum": spectrum_json(&report.spectrum.eigenvalues),
        "margin": real_value(report.margin),
        "margin_tol": real_value(report.margin_tol),
        "decay_rate": real_value(report.decay_rate),
        "nonnormality_constant": real_value(report.nonnormality_constant),
        "defective_fallback": report.defective_fallback,
        "dim_s": report.dim_s(),
        "dim_t": report.dim_t(),
    });
    if report.verdict.has_dichotomy() {
        let split = split_subspaces(&report, &f, &iv)?;
        v["s_basis"] = matrix_value(split.s_state.basis());
        v["t_basis"] = matrix_value(split.t_state.basis());
        v["projector_p"] = matrix_value(report.projector_p.as_ref().expect("dichotomy carries P"));
        v["direct_sum_residual"] = real_value(split.direct_sum_residual);
        v["invariance_residual"] = real_value(split.invariance_residual);
    }
    emit_report(&a.common.out, stdout, a.format, &v)
}

fn cmd_laplace(a: &LaplaceArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let p = load_pencil(&a.common)?;
    let (f, iv) = factorize(&a.common, &p)?;
    let u0 = parse_u0(&a.u0, &iv, a.seed)?;
    let s0 = f.spectrum()?.s0;
    let mut cfg = LaplaceConfig::for_abscissa(s0);
    if let Some(rho) = a.rho {
        cfg.rho = rho;
    }
    cfg.frequencies = a.frequencies.clone().unwrap_or_else(|| DEFAULT_FREQUENCIES.to_vec());
    cfg.quad_tol = a.quad_tol;
    let r = transform_residual_with(&f, &iv, &u0, &cfg)?;
    let v = json!({
        "rho": r.rho,
        "rho_prime": r.rho_prime,
        "truncation_t": r.truncation_t,
        "frequencies": r.frequencies,
        "residuals": r.residuals,
        "max_residual": r.max_residual,
        "residuals_rho_prime": r.residuals_rho_prime,
        "rho_pair_discrepancy": r.rho_pair_discrepancy,
        "quad_tol": cfg.quad_tol,
    });
    emit_report(&a.common.out, stdout, a.format, &v)
}

fn verify_text(r: &verify::VerificationReport) -> String {
    let mut s = format!("seed {} count {}\n", r.seed, r.count);
    for p in &r.properties {
        let worst: Vec<String> =
            p.worst.iter().map(|m| format!("{}={:.3e} (<= {:e})", m.name, m.value, m.threshold)).collect();
        s.push_str(&format!(
            "[{}] {:<12} {:>3} instances  {}\n",
            if p.passed { "PASS" } else { "FAIL" },
            p.suite.name(),
            p.instances,
            worst.join(", ")
        ));
        for (id, e) in &p.errors {
            s.push_str(&format!("       instance {id}: {e}\n"));
        }
    }
    s
}

fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    #[cfg(any(test, feature = "fault-injection"))]
    let inject_fault = a.inject_fault;
    #[cfg(not(any(test, feature = "fault-injection")))]
    let inject_fault = false;
    let opts = VerifyOptions {
        seed: a.seed,
        count: a.count,
        suites: if a.only.is_empty() { Suite::ALL.to_vec() } else { a.only.clone() },
        inject_fault,
    };
    let report = verify::run_verification(&opts)?;
    match a.format {
        Format::Text => emit(&a.out, stdout, &verify_text(&report))?,
        _ => emit_json(&a.out, stdout, &serde_json::to_value(&report).expect("report serializes"))?,
    }
    if report.all_passed {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}

fn cmd_generate(a: &GenerateArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let hint = match &a.spectrum {
        Some(s) => Some(rio::parse_vector(s)?.iter().copied().collect::<Vec<_>>()),
        None => None,
    };
    let p = generate_regular(a.n, a.rank, a.seed, hint.as_deref())?;
    emit_json(&a.out, stdout, &rio::pencil_value(&p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("regdae").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn injected_fault_fails_verification() {
        let (code, out, _) = run_args(&["verify", "--only", "spectrum", "--count", "3", "--inject-fault"]);
        assert_eq!(code, EXIT_VERIFY_FAILED);
        assert!(out.contains("\"all_passed\": false"));
        let (code, _, _) = run_args(&["verify", "--only", "spectrum", "--count", "3"]);
        assert_eq!(code, EXIT_OK);
    }

    #[test]
    fn error_classes() {
        assert_eq!(CliError::from(Error::NotRegular { sigma_min_b: 0.0 }).exit_code(), EXIT_REFUSED);
        assert_eq!(CliError::from(Error::BadRank { n: 1, rank: 2 }).exit_code(), EXIT_USAGE);
        assert_eq!(run_args(&["bogus"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }
}
