//! Command definitions and their implementations.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use jms_core::analysis::{check_identities, delta_survey, jacobi_table, SigmaClass};
use jms_core::factor::factorize;
use jms_core::transvect::word_standard_tau;
use jms_core::{BasisMap, Field, FieldSpec, OperatorMatrix, PrimeField, Rationals};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;
use crate::format::{Header, IdentityJson, OperatorJson, ReportJson, WordJson};

/// Tolerance for comparing character-sum magnitudes.
const SIGMA_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "jms", version, about = "Factor linear maps on n x n matrices into Jordan multiplication operators")]
pub struct Cli {
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factor an operator file into a word and write the verified report.
    Factorize(FactorizeArgs),
    /// Check that a word file evaluates exactly to a target operator file.
    Verify(VerifyArgs),
    /// Run the registered operator identities on random exact inputs.
    Check(CheckArgs),
    /// Determinant-group and character-sum surveys over F_p.
    #[command(subcommand)]
    Survey(SurveyCommand),
    /// Emit the word for the standard transvection E_b -> E_b + t E_a.
    Transvection(TransvectionArgs),
}

#[derive(Debug, Args)]
pub struct FactorizeArgs {
    /// `Q` or `Fp:<p>`.
    #[arg(long)]
    pub field: String,
    #[arg(long)]
    pub n: usize,
    /// Operator JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Report destination; stdout if omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Print the word length on stderr.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Word JSON file.
    #[arg(long)]
    pub input: PathBuf,
    /// Operator JSON file the word should evaluate to.
    #[arg(long)]
    pub target: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub field: String,
    #[arg(long)]
    pub n: usize,
    /// Identity id, or `all`.
    #[arg(long, default_value = "all")]
    pub identity: String,
    /// Random inputs per identity.
    #[arg(long, default_value_t = 30)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the JSON report here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SurveyCommand {
    /// Subgroup of F_p^x reached by determinants of single factors.
    Delta {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Magnitudes of sum_t chi(t) chi^m(t + 1) over all nontrivial characters.
    Jacobi {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u64,
    },
}

#[derive(Debug, Args)]
pub struct TransvectionArgs {
    #[arg(long)]
    pub field: String,
    #[arg(long)]
    pub n: usize,
    /// Direction unit `i,j` (1-based).
    #[arg(long, value_parser = parse_unit)]
    pub a: (usize, usize),
    /// Moved unit `k,l` (1-based).
    #[arg(long, value_parser = parse_unit)]
    pub b: (usize, usize),
    #[arg(long, allow_hyphen_values = true)]
    pub t: String,
    /// Word destination; stdout if omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_unit(s: &str) -> Result<(usize, usize), String> {
    let (i, j) = s.split_once(',').ok_or_else(|| format!("expected `i,j`, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    let (i, j) = (parse(i)?, parse(j)?);
    if i == 0 || j == 0 {
        return Err("indices are 1-based".into());
    }
    Ok((i, j))
}

macro_rules! with_field {
    ($spec:expr, $f:ident => $body:expr) => {
        match $spec {
            FieldSpec::Rationals => {
                let $f = Rationals;
                $body
            }
            FieldSpec::PrimeField(p) => {
                let $f = PrimeField::new(p)?;
                $body
            }
        }
    };
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.to_path_buf(), source })
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("plain data serializes");
    match output {
        Some(path) => fs::write(path, text + "\n").map_err(|source| CliError::Io { path: path.to_path_buf(), source }),
        None => writeln!(out, "{text}").map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

fn io_err(source: std::io::Error) -> CliError {
    CliError::Io { path: PathBuf::from("<stdout>"), source }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Factorize(a) => cmd_factorize(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Check(a) => cmd_check(&a, out),
        Command::Survey(s) => cmd_survey(&s, out),
        Command::Transvection(a) => cmd_transvection(&a, out),
    }
}

pub fn cmd_factorize(args: &FactorizeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec: FieldSpec = args.field.parse()?;
    let op: OperatorJson = read_json(&args.input)?;
    if op.n != args.n {
        return Err(CliError::input(format!("--n {} but the input operator has n = {}", args.n, op.n)));
    }
    with_field!(spec, f => {
        let target = op.to_operator(&f)?;
        let report = factorize(&target)?;
        log::info!("factorized over {spec} with n = {}: {} factors", args.n, report.length);
        if args.stats {
            eprintln!("length k(T) = {}", report.length);
        }
        emit(&ReportJson::from_report(&report), args.output.as_deref(), out)?;
        if !report.verified {
            return Err(CliError::Verification("the constructed word does not evaluate to the input".into()));
        }
        Ok(())
    })
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let header: Header = read_json(&args.input)?;
    let spec: FieldSpec = header.field.parse()?;
    let word: WordJson = read_json(&args.input)?;
    let target: OperatorJson = read_json(&args.target)?;
    if word.n != target.n {
        return Err(CliError::input(format!("word has n = {}, target has n = {}", word.n, target.n)));
    }
    with_field!(spec, f => {
        let w = word.to_word(&f)?;
        let t = target.to_operator(&f)?;
        let report = w.verify(&t)?;
        writeln!(out, "length {}: {}", report.length, if report.verified { "verified" } else { "MISMATCH" }).map_err(io_err)?;
        if report.verified {
            Ok(())
        } else {
            Err(CliError::Verification("word does not evaluate to the target".into()))
        }
    })
}

pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec: FieldSpec = args.field.parse()?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let results = with_field!(spec, f => check_identities(&args.identity, &f, args.n, args.samples, &mut rng)?);
    for r in &results {
        let status = match (&r.skipped, r.pass) {
            (Some(_), _) => "skip",
            (None, true) => "pass",
            (None, false) => "FAIL",
        };
        let detail = r.counterexample.as_deref().or(r.skipped.as_deref()).unwrap_or("");
        writeln!(out, "{:<26} {:<6} n={} {status} {detail}", r.id.as_str(), r.field.to_string(), r.n).map_err(io_err)?;
    }
    if let Some(path) = &args.output {
        let json: Vec<IdentityJson> = results.iter().map(IdentityJson::from).collect();
        emit(&json, Some(path), out)?;
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.id.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("identities failed: {}", failed.join(", "))))
    }
}

pub fn cmd_survey(cmd: &SurveyCommand, out: &mut dyn Write) -> Result<(), CliError> {
    match *cmd {
        SurveyCommand::Delta { p, n } => {
            if n == 0 {
                return Err(CliError::input("n must be positive"));
            }
            let s = delta_survey(p, n)?;
            writeln!(out, "p = {p}, n = {n}: {} generators, subgroup order {} of {}", s.generators.len(), s.order(), p - 1).map_err(io_err)?;
            writeln!(out, "{:>6}  {:>6}  generator values", "det", "length").map_err(io_err)?;
            for (gamma, path) in &s.table {
                let values: Vec<String> = path.iter().map(|&i| s.generators[i].0.to_string()).collect();
                writeln!(out, "{gamma:>6}  {:>6}  {}", path.len(), values.join(" * ")).map_err(io_err)?;
            }
            if s.is_full() {
                Ok(())
            } else {
                Err(CliError::Verification(format!("only {} of {} determinants reached", s.order(), p - 1)))
            }
        }
        SurveyCommand::Jacobi { p, m } => {
            let table = jacobi_table(p, m)?;
            let sqrt_p = (p as f64).sqrt();
            writeln!(out, "p = {p}, m = {m}, sqrt(p) = {sqrt_p:.9}").map_err(io_err)?;
            writeln!(out, "{:>4}  {:<13} {:>12}  {:>12}", "j", "class", "|Sigma|", "expected").map_err(io_err)?;
            let mut bad = Vec::new();
            for s in &table {
                let gap_ok = p < 5 || s.magnitude() < (p - 2) as f64;
                let bound_ok = s.magnitude() <= sqrt_p + SIGMA_TOL;
                let ok = s.matches_classification(SIGMA_TOL) && gap_ok && bound_ok;
                writeln!(
                    out,
                    "{:>4}  {:<13} {:>12.9}  {:>12.9}{}",
                    s.j,
                    s.classification.as_str(),
                    s.magnitude(),
                    s.expected_magnitude(),
                    if ok { "" } else { "  MISMATCH" }
                )
                .map_err(io_err)?;
                if !ok {
                    bad.push(s.j);
                }
            }
            let generic = table.iter().filter(|s| s.classification == SigmaClass::JacobiCase).count();
            writeln!(out, "{generic} of {} characters in the generic case", table.len()).map_err(io_err)?;
            if bad.is_empty() {
                Ok(())
            } else {
                Err(CliError::Verification(format!("characters {bad:?} break the magnitude classification")))
            }
        }
    }
}

pub fn cmd_transvection(args: &TransvectionArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec: FieldSpec = args.field.parse()?;
    let (a, b) = ((args.a.0 - 1, args.a.1 - 1), (args.b.0 - 1, args.b.1 - 1));
    with_field!(spec, f => {
        let t = f.parse(&args.t)?;
        let word = word_standard_tau(&f, args.n, a, b, &t)?;
        let basis = BasisMap::new(args.n);
        let expected = OperatorMatrix::transvection(f, args.n, basis.index(a.0, a.1), basis.index(b.0, b.1), &t);
        log::info!("transvection word has {} factors", word.len());
        emit(&WordJson::from_word(&word), args.output.as_deref(), out)?;
        if word.evaluate() == expected {
            Ok(())
        } else {
            Err(CliError::Verification("transvection word does not evaluate to id + t eps".into()))
        }
    })
}
