use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use psdrigid_core::classify::{self, RigidityReport};
use psdrigid_core::factorization::{self, PsdFactorization};
use psdrigid_core::io::{self as pio, JsonScalar};
use psdrigid_core::{oracle, Error, Rational, Scalar, DEFAULT_TOL};

mod motions;
mod render;

#[derive(Parser, Debug)]
#[command(name = "psdrigid", version, about = "Rigidity and uniqueness of size-2 psd factorizations")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Tolerance for sign and rank decisions.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL, value_parser = positive)]
    tol: f64,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout (output directory for `generate`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Read numbers as exact rationals.
    #[arg(long, global = true)]
    exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify rigidity in the regime given by the number of orthogonal pairs.
    Classify { input: PathBuf },
    /// Decide uniqueness of the factorization up to GL(2); validates M first.
    Uniqueness { input: PathBuf },
    /// Check shapes, psd-ness of every factor and ⟨Aᵢ, Bⱼ⟩ = Mᵢⱼ.
    Validate { input: PathBuf },
    /// Evidence on whether M lies on the boundary of the psd-rank-2 set.
    Boundary { input: PathBuf },
    /// Trivial motions, the cone matrix, its kernels and the solved motion space.
    Motions { input: PathBuf },
    /// Randomized search for a nontrivial s-infinitesimal motion (needs --seed).
    Oracle {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        s: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Write random rank-one factorizations and a classification manifest (needs --seed, --out).
    Generate {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        /// Zero of M at row I, column J (1-based); repeatable.
        #[arg(long = "zero", value_name = "I,J", value_parser = zero_entry)]
        zeros: Vec<(usize, usize)>,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(..) | CliError::Usage(_) | CliError::Core(Error::Parse { .. } | Error::Lp(_)) => 1,
            CliError::Core(_) => 2,
        }
    }

    /// Refusals still produce a report listing the violations.
    fn report(&self, c: &Common) -> Option<Value> {
        let mut v = match self {
            CliError::Core(Error::Precondition(v)) => v.clone(),
            CliError::Core(e) if self.exit_code() == 2 => vec![e.to_string()],
            _ => return None,
        };
        if c.exact && matches!(self, CliError::Core(Error::NotPsd | Error::NotRankOne(_))) {
            v.push("exact mode decides signs and ranks without tolerance; decimals rounded from floats are rarely exactly rank-one".into());
        }
        Some(pio::refusal_to_json(&v, c.tol))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("expected a positive number, found {s:?}")),
    }
}

fn zero_entry(s: &str) -> std::result::Result<(usize, usize), String> {
    let parse = |x: &str| x.trim().parse::<usize>().ok().filter(|&v| v >= 1);
    match s.split_once(',') {
        Some((i, j)) => match (parse(i), parse(j)) {
            (Some(i), Some(j)) => Ok((i - 1, j - 1)),
            _ => Err(format!("expected 1-based I,J, found {s:?}")),
        },
        None => Err(format!("expected I,J, found {s:?}")),
    }
}

fn read<T: JsonScalar>(path: &Path) -> CliResult<PsdFactorization<T>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    Ok(pio::parse_factorization(&text)?)
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn need_seed(c: &Common, cmd: &str) -> CliResult<u64> {
    c.seed.ok_or_else(|| CliError::Usage(format!("{cmd} needs --seed")))
}

/// Runs `f` on the input read as f64 or, with --exact, as rationals.
fn with_input<R>(
    c: &Common,
    input: &Path,
    f64_run: impl FnOnce(&PsdFactorization<f64>) -> CliResult<R>,
    exact_run: impl FnOnce(&PsdFactorization<Rational>) -> CliResult<R>,
) -> CliResult<R> {
    if c.exact {
        exact_run(&read::<Rational>(input)?)
    } else {
        f64_run(&read::<f64>(input)?)
    }
}

fn report_json(r: &RigidityReport, tol: f64) -> Value {
    pio::report_to_json(r, tol)
}

fn classify_any<T: Scalar>(f: &PsdFactorization<T>, tol: f64) -> CliResult<Value> {
    Ok(report_json(&classify::classify(f, tol)?, tol))
}

fn uniqueness_any<T: Scalar>(f: &PsdFactorization<T>, tol: f64) -> CliResult<Value> {
    Ok(report_json(&classify::uniqueness(f, tol)?, tol))
}

fn generate(c: &Common, p: usize, q: usize, zeros: &[(usize, usize)], count: usize) -> CliResult<Value> {
    let seed = need_seed(c, "generate")?;
    let dir = c.out.as_deref().ok_or_else(|| CliError::Usage("generate needs --out DIR".into()))?;
    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    let mut manifest = Vec::with_capacity(count);
    for i in 0..count {
        // instance seeds are derived so a corpus is reproducible file by file
        let f = factorization::generate_rank_one(p, q, zeros, seed.wrapping_add(i as u64))?;
        let name = format!("instance_{i:04}.json");
        let text = serde_json::to_string_pretty(&pio::factorization_to_json(&f)).expect("json");
        write(&dir.join(&name), &(text + "\n"))?;
        let r = classify::classify(&f, c.tol)?;
        manifest.push(json!({
            "file": name,
            "zero_count": r.zero_count,
            "verdicts": {
                "one_inf_rigid": r.one_inf_rigid.to_string(),
                "two_inf_rigid": r.two_inf_rigid,
                "locally_rigid": r.locally_rigid.to_string(),
                "globally_rigid": r.globally_rigid.to_string(),
            },
        }));
    }
    let manifest = Value::Array(manifest);
    let text = serde_json::to_string_pretty(&manifest).expect("json");
    write(&dir.join("manifest.json"), &(text + "\n"))?;
    let rigid = manifest.as_array().map_or(0, |m| m.iter().filter(|e| e["verdicts"]["two_inf_rigid"] == true).count());
    Ok(
        json!({ "count": count, "two_inf_rigid": rigid, "flexible": count - rigid, "manifest": dir.join("manifest.json") }),
    )
}

fn run(cli: &Cli) -> CliResult<Value> {
    let c = &cli.common;
    let tol = c.tol;
    match &cli.command {
        Command::Classify { input } => with_input(c, input, |f| classify_any(f, tol), |f| classify_any(f, tol)),
        Command::Uniqueness { input } => with_input(c, input, |f| uniqueness_any(f, tol), |f| uniqueness_any(f, tol)),
        Command::Validate { input } => with_input(
            c,
            input,
            |f| Ok(pio::validation_to_json(&factorization::validate(f, tol), tol)),
            |f| Ok(pio::validation_to_json(&factorization::validate(f, tol), tol)),
        ),
        Command::Boundary { input } => with_input(
            c,
            input,
            |f| Ok(pio::boundary_to_json(&classify::boundary_report(f, tol)?, tol)),
            |f| Ok(pio::boundary_to_json(&classify::boundary_report(f, tol)?, tol)),
        ),
        Command::Motions { input } => {
            with_input(c, input, |f| Ok(motions::report(f, tol)), |f| Ok(motions::report(&f.to_f64(), tol)))
        }
        Command::Oracle { input, s, trials } => {
            let seed = need_seed(c, "oracle")?;
            if *s == 0 {
                return Err(CliError::Usage("--s must be at least 1".into()));
            }
            let f = with_input(c, input, |f| Ok(f.clone()), |f| Ok(f.to_f64()))?;
            let v = oracle::sample_motion_oracle(&f, *s, *trials, seed, tol)?;
            let mut out = pio::oracle_to_json(&v, *s);
            out["tolerance"] = tol.to_json();
            Ok(out)
        }
        Command::Generate { p, q, zeros, count } => generate(c, *p, *q, zeros, *count),
    }
}

fn emit(cli: &Cli, v: &Value) -> CliResult<()> {
    let text = match cli.common.format {
        Format::Json => serde_json::to_string_pretty(v).expect("json") + "\n",
        Format::Text => render::text(v),
    };
    // generate uses --out as its directory and reports the tally on stdout
    match (&cli.common.out, &cli.command) {
        (Some(path), cmd) if !matches!(cmd, Command::Generate { .. }) => write(path, &text),
        _ => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    // usage errors share exit code 1 with I/O errors; 2 is reserved for refusals
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = run(&cli).and_then(|v| emit(&cli, &v));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("psdrigid: {e}");
            if let Some(v) = e.report(&cli.common) {
                let _ = emit(&cli, &v);
            }
            ExitCode::from(e.exit_code())
        }
    }
}
