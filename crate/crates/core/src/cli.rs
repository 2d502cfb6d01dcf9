//! `iwit` command-line front end.
//!
//! Results go to stdout (or `--out`), diagnostics to stderr. Exit codes:
//! 0 success, 2 invalid input, 3 solver gave no verdict.

use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use crate::compatibility::{self, joint_feasibility, Verdict};
use crate::discrimination::{self, p_post_opt, p_prior_opt, pguess_analytic, pguess_iterative, p_prior_with};
use crate::ensemble::{mub_ensemble, EnsembleJson, NoiseVector, PartitionedEnsemble, StateEnsemble};
use crate::error::IwitError;
use crate::mub::{
    boundary_curve, ellipse_form, fourier_mub, mu_of_theta, mub_witness_value, noisy_mub_pair, p_post_mub,
    p_prior_mub, region_membership, theta0, witness_constant, SmearingVector,
};
use crate::povm::MeasurementPair;
use crate::random::random_pair;
use crate::witness::{eval_witness, normalize_to_ensemble, normalized_delta, witness_from_ensemble, Witness};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_UNDETERMINED: i32 = 3;

pub const CSV_HEADER: &str = "theta,gamma_phi,gamma_psi,p_prior,p_post,witness_constant";

#[derive(Debug, Parser)]
#[command(name = "iwit", version, about = "Incompatibility witnesses from state discrimination")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the compatibility boundary of noisy MUB pairs
    Boundary(BoundaryArgs),
    /// Decide joint measurability numerically
    Compat(CompatArgs),
    /// Optimal guessing probabilities of an ensemble
    Discriminate(DiscriminateArgs),
    /// Evaluate the tight MUB witness on a noisy MUB pair
    MubWitness(MubWitnessArgs),
    /// Evaluate a witness on a measurement pair
    WitnessEval(WitnessEvalArgs),
    /// Turn a witness into a partitioned ensemble
    NormalizeWitness(NormalizeArgs),
    /// Closed-form region membership of a noisy MUB pair
    Region(RegionArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct BoundaryArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct CompatArgs {
    /// Measurement pair JSON; alternatively give --dim and --gamma
    #[arg(long, conflicts_with_all = ["dim", "gamma"])]
    pair: Option<PathBuf>,
    #[arg(long, requires = "gamma")]
    dim: Option<usize>,
    #[arg(long, value_parser = parse_two, allow_hyphen_values = true, requires = "dim")]
    gamma: Option<(f64, f64)>,
    #[arg(long, default_value_t = compatibility::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = compatibility::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Also write the report (with certificate) here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DiscriminateArgs {
    /// Ensemble JSON, partitioned if it carries blockX/blockY; alternatively --dim and --mu
    #[arg(long, conflicts_with_all = ["dim", "mu"])]
    ensemble: Option<PathBuf>,
    #[arg(long, requires = "mu")]
    dim: Option<usize>,
    #[arg(long, value_parser = parse_two, allow_hyphen_values = true, requires = "dim")]
    mu: Option<(f64, f64)>,
    #[arg(long, default_value_t = discrimination::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = discrimination::DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Write the optimal measurement here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the witness of a partitioned ensemble here
    #[arg(long)]
    witness_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MubWitnessArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, value_parser = parse_two, allow_hyphen_values = true)]
    mu: (f64, f64),
    #[arg(long, value_parser = parse_two, allow_hyphen_values = true)]
    gamma: (f64, f64),
    /// Write the evaluated measurement pair here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct WitnessEvalArgs {
    #[arg(long)]
    witness: PathBuf,
    #[arg(long)]
    pair: PathBuf,
}

#[derive(Debug, Args)]
struct NormalizeArgs {
    #[arg(long)]
    witness: PathBuf,
    /// Random pairs on which the normalization identity is rechecked
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RegionArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, value_parser = parse_two, allow_hyphen_values = true)]
    gamma: (f64, f64),
    /// Write the noisy MUB pair here
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_two(s: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(format!("expected two comma-separated numbers, got {s:?}"));
    }
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    Ok((num(parts[0])?, num(parts[1])?))
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
}

impl From<IwitError> for Failure {
    fn from(e: IwitError) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type CliResult = std::result::Result<i32, Failure>;

/// Formats floats with 15 significant digits in lowercase scientific notation.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.14e}")
}

struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_float(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
}

/// Single-line JSON with deterministic float formatting.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

fn load<T: DeserializeOwned>(path: &Path) -> std::result::Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let at = e.path().to_string();
        Failure::Invalid(format!("{}: at `{at}`: {}", path.display(), e.inner()))
    })
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, format!("{text}\n")),
        None => writeln!(out, "{text}"),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> std::result::Result<(), Failure> {
    fs::write(path, format!("{}\n", to_json(value))).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

/// One row of the boundary table.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CurveRecord {
    pub theta: f64,
    pub gamma_phi: f64,
    pub gamma_psi: f64,
    pub p_prior: f64,
    pub p_post: f64,
    pub witness_constant: f64,
}

/// `samples` equispaced θ on `[−θ₀, θ₀)` (`[−π, π)` for `d = 2`), with the
/// optimal-margin point and the guessing probabilities of `Ξ_μ(θ)`.
pub fn boundary_records(d: usize, samples: usize) -> crate::error::Result<Vec<CurveRecord>> {
    if d < 2 {
        return Err(IwitError::InvalidDimension(d));
    }
    if samples == 0 {
        return Err(IwitError::InvalidArgument("samples must be positive".into()));
    }
    let half = if d == 2 { PI } else { theta0(d) };
    (0..samples)
        .map(|k| {
            let theta = -half + 2.0 * half * k as f64 / samples as f64;
            let g = boundary_curve(d, theta)?;
            let mu = mu_of_theta(d, theta);
            Ok(CurveRecord {
                theta,
                gamma_phi: g.gamma_phi,
                gamma_psi: g.gamma_psi,
                p_prior: p_prior_mub(d, mu)?,
                p_post: p_post_mub(d, mu)?,
                witness_constant: witness_constant(d, mu),
            })
        })
        .collect()
}

fn boundary(a: &BoundaryArgs, out: &mut dyn Write) -> CliResult {
    let recs = boundary_records(a.dim, a.samples)?;
    let text = match a.format {
        Format::Json => to_json(&recs),
        Format::Csv => {
            let mut s = String::from(CSV_HEADER);
            for r in &recs {
                let row = [r.theta, r.gamma_phi, r.gamma_psi, r.p_prior, r.p_post, r.witness_constant];
                s.push('\n');
                s.push_str(&row.map(fmt_float).join(","));
            }
            s
        }
    };
    emit(out, a.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn mub_pair(dim: usize, gamma: (f64, f64)) -> crate::error::Result<MeasurementPair> {
    if dim < 2 {
        return Err(IwitError::InvalidDimension(dim));
    }
    noisy_mub_pair(&fourier_mub(dim), SmearingVector::new(gamma.0, gamma.1))
}

fn compat(a: &CompatArgs, out: &mut dyn Write) -> CliResult {
    let pair = match (&a.pair, a.dim, a.gamma) {
        (Some(p), _, _) => load::<MeasurementPair>(p)?,
        (None, Some(d), Some(g)) => mub_pair(d, g)?,
        _ => return Err(Failure::Invalid("give --pair or both --dim and --gamma".into())),
    };
    let report = joint_feasibility(&pair, a.tol, a.max_iter)?;
    if let Some(p) = &a.out {
        write_json(p, &report)?;
    }
    let summary = json!({
        "verdict": report.verdict,
        "residual": report.residual,
        "iterations": report.iterations,
    });
    emit(out, None, &to_json(&summary))?;
    Ok(if report.verdict == Verdict::Undetermined { EXIT_UNDETERMINED } else { EXIT_OK })
}

fn discriminate(a: &DiscriminateArgs, out: &mut dyn Write) -> CliResult {
    let raw: EnsembleJson = match (&a.ensemble, a.dim, a.mu) {
        (Some(p), _, _) => load(p)?,
        (None, Some(d), Some(mu)) => {
            if d < 2 {
                return Err(IwitError::InvalidDimension(d).into());
            }
            mub_ensemble(NoiseVector::new(mu.0, mu.1), &fourier_mub(d))?.into()
        }
        _ => return Err(Failure::Invalid("give --ensemble or both --dim and --mu".into())),
    };
    if raw.block_x.is_some() || raw.block_y.is_some() {
        let pe = PartitionedEnsemble::try_from(raw)?;
        return discriminate_partitioned(a, &pe, out);
    }
    if a.witness_out.is_some() {
        return Err(Failure::Invalid("--witness-out needs a partitioned ensemble".into()));
    }
    let e = StateEnsemble::try_from(raw)?;
    let r = match pguess_analytic(&e)? {
        Some(r) => r,
        None => match pguess_iterative(&e, a.max_iter, a.tol) {
            Ok(r) => r,
            Err(IwitError::MaxIterExceeded { best_value, residual }) => {
                let body = json!({"p_guess": best_value, "method": "Iterative", "gap": residual, "converged": false});
                emit(out, None, &to_json(&body))?;
                return Ok(EXIT_UNDETERMINED);
            }
            Err(e) => return Err(e.into()),
        },
    };
    if let (Some(p), Some(m)) = (&a.out, &r.optimal_povm) {
        write_json(p, m)?;
    }
    let body = json!({"p_guess": r.value, "method": r.method, "gap": r.residual, "iterations": r.iterations, "converged": true});
    emit(out, None, &to_json(&body))?;
    Ok(EXIT_OK)
}

fn discriminate_partitioned(a: &DiscriminateArgs, pe: &PartitionedEnsemble, out: &mut dyn Write) -> CliResult {
    let prior = p_prior_opt(pe);
    let post = p_post_opt(pe);
    let (prior, post) = match (prior, post) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(IwitError::MaxIterExceeded { .. }), _) | (_, Err(IwitError::MaxIterExceeded { .. })) => {
            emit(out, None, &to_json(&json!({"converged": false})))?;
            return Ok(EXIT_UNDETERMINED);
        }
        (Err(e), _) | (_, Err(e)) => return Err(e.into()),
    };
    if let (Some(p), Some(m)) = (&a.out, &post.optimal_povm) {
        write_json(p, m)?;
    }
    if let Some(p) = &a.witness_out {
        write_json(p, &witness_from_ensemble(pe, None)?)?;
    }
    let body = json!({
        "p_prior": prior.value,
        "p_post": post.value,
        "gap": prior.value - post.value,
        "post_method": post.method,
        "nu": post.nu,
    });
    emit(out, None, &to_json(&body))?;
    Ok(EXIT_OK)
}

fn mub_witness(a: &MubWitnessArgs, out: &mut dyn Write) -> CliResult {
    let pair = mub_pair(a.dim, a.gamma)?;
    let w = mub_witness_value(&fourier_mub(a.dim), NoiseVector::new(a.mu.0, a.mu.1), &pair)?;
    if let Some(p) = &a.out {
        write_json(p, &pair)?;
    }
    emit(out, None, &to_json(&json!({"witness_value": w, "detected": w < 0.0})))?;
    Ok(EXIT_OK)
}

fn witness_eval(a: &WitnessEvalArgs, out: &mut dyn Write) -> CliResult {
    let w: Witness = load(&a.witness)?;
    let pair: MeasurementPair = load(&a.pair)?;
    let v = eval_witness(&w, &pair)?;
    emit(out, None, &to_json(&json!({"witness_value": v, "detected": v < 0.0})))?;
    Ok(EXIT_OK)
}

fn normalize_witness(a: &NormalizeArgs, out: &mut dyn Write) -> CliResult {
    let w: Witness = load(&a.witness)?;
    let (pe, alpha) = normalize_to_ensemble(&w)?;
    let delta_prime = normalized_delta(&w, alpha)?;
    let mut rng = StdRng::seed_from_u64(a.seed);
    let mut max_err: f64 = 0.0;
    for _ in 0..a.samples {
        let pair = random_pair(w.f().labels.len(), w.g().labels.len(), w.dim(), &mut rng)?;
        // relabel onto the witness's outcome sets
        let pair = relabel(&pair, &w.f().labels, &w.g().labels)?;
        let lhs = alpha * eval_witness(&w, &pair)?;
        let rhs = delta_prime - p_prior_with(&pe, &pair)?;
        max_err = max_err.max((lhs - rhs).abs());
    }
    let body = json!({
        "alpha": alpha,
        "delta_prime": delta_prime,
        "max_identity_error": max_err,
        "samples": a.samples,
        "ensemble": pe,
    });
    emit(out, a.out.as_deref(), &to_json(&body))?;
    Ok(EXIT_OK)
}

fn relabel(pair: &MeasurementPair, xs: &[String], ys: &[String]) -> crate::error::Result<MeasurementPair> {
    let a = crate::povm::validate_povm(pair.a().effects().to_vec(), xs.to_vec(), crate::povm::POVM_TOL)?;
    let b = crate::povm::validate_povm(pair.b().effects().to_vec(), ys.to_vec(), crate::povm::POVM_TOL)?;
    MeasurementPair::new(a, b)
}

fn region(a: &RegionArgs, out: &mut dyn Write) -> CliResult {
    let g = SmearingVector::new(a.gamma.0, a.gamma.1);
    let r = region_membership(a.dim, g)?;
    if let Some(p) = &a.out {
        write_json(p, &mub_pair(a.dim, a.gamma)?)?;
    }
    let body = json!({"region": r, "ellipse_form": ellipse_form(a.dim, g), "target": 4.0 - a.dim as f64});
    emit(out, None, &to_json(&body))?;
    Ok(EXIT_OK)
}

fn init_logging() {
    let env = env_logger::Env::new().filter("IWIT_LOG");
    let _ = env_logger::Builder::from_env(env).target(env_logger::Target::Stderr).try_init();
}

/// Runs the CLI on `args` (including the program name) with explicit streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Boundary(a) => boundary(a, out),
        Command::Compat(a) => compat(a, out),
        Command::Discriminate(a) => discriminate(a, out),
        Command::MubWitness(a) => mub_witness(a, out),
        Command::WitnessEval(a) => witness_eval(a, out),
        Command::NormalizeWitness(a) => normalize_witness(a, out),
        Command::Region(a) => region(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INVALID
        }
    }
}

/// Runs the CLI against the process's stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_with(std::iter::once("iwit").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(0.5), "5.00000000000000e-1");
        assert_eq!(fmt_float(-0.146446609406726), "-1.46446609406726e-1");
        assert_eq!(to_json(&json!({"x": 1.0})), "{\"x\":1.00000000000000e0}");
    }

    #[test]
    fn mub_witness_example() {
        let (code, out, _) = call(&["mub-witness", "--dim", "2", "--mu", "1,1", "--gamma", "1,1"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["witness_value"].as_f64().unwrap() + 0.146447).abs() < 1e-6);
        assert_eq!(v["detected"], true);
    }

    #[test]
    fn negative_pairs_parse() {
        let (code, out, _) = call(&["region", "--dim", "3", "--gamma", "-0.5,-0.5"]);
        assert_eq!(code, 0);
        assert!(out.contains("Boundary"));
    }

    #[test]
    fn bad_input_exits_2() {
        assert_eq!(call(&["region", "--dim", "3", "--gamma", "2,0"]).0, 2);
        assert_eq!(call(&["region", "--dim", "3"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
    }

    #[test]
    fn boundary_grid_contains_zero() {
        let recs = boundary_records(3, 64).unwrap();
        assert_eq!(recs.len(), 64);
        assert_eq!(recs[32].theta, 0.0);
        assert!((recs[32].gamma_phi - 0.683013).abs() < 1e-6);
        for r in &recs {
            let g = SmearingVector::new(r.gamma_phi, r.gamma_psi);
            assert!((ellipse_form(3, g) - 1.0).abs() < 1e-9);
            assert!(r.p_post <= r.p_prior + 1e-12);
        }
    }
}
