//! The `maforms` command line.
//!
//! Every subcommand reads an optional JSON form document (see
//! [`document`]), runs one family of checks and writes a report. Exit codes:
//! 0 pass, 1 check failure, 2 invalid input, 3 non-effective form,
//! 4 degenerate form.

mod commands;
pub mod document;

use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::error::Error;

pub use commands::{classify_document, split_document, symplectic_space};
pub use document::{FormDocument, JsonScalar, ScalarMode};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_EFFECTIVE: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "maforms", version, about = "Invariants of effective 3-forms and Monge-Ampère structures on T*R^3")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON form document; stdin when absent or "-".
    #[arg(long, global = true)]
    pub input: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Overrides the scalar mode of the document.
    #[arg(long, global = true, value_enum)]
    pub scalar: Option<ScalarMode>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Finite-difference step.
    #[arg(long, global = true)]
    pub h: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Sample box as "lo,hi"; give it once for a cube or once per axis.
    #[arg(long = "box", global = true)]
    pub sample_box: Vec<String>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// λ, q_ω signature and orbit class of a constant 3-form.
    Classify {
        /// Replace the form by its effective part first.
        #[arg(long)]
        project: bool,
    },
    /// Split a non-degenerate form into α, β and report its normalized structure.
    Split,
    /// Check a regular or generalized solution of the Monge-Ampère equation.
    CheckSolution {
        #[arg(long, value_enum)]
        solution: SolutionKind,
        /// Polynomial solution as a JSON map from exponent strings "a,b,c" to rationals.
        #[arg(long)]
        poly: Option<String>,
        #[arg(long, default_value = "0")]
        gamma: String,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Adds `ε·x³` to the solution.
        #[arg(long)]
        perturb: Option<f64>,
    },
    /// Nondegeneracy, closedness, integrability and flatness of a form field.
    CheckStructure,
    /// Run a worked example.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        #[arg(long, default_value = "2")]
        gamma: String,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolutionKind {
    /// `⅓(x² + 2y)^{3/2} − ½z²` for the γ = 0 Chynoweth–Sewell form.
    CsRegular,
    /// The quadrature solution of hess(f) = 1.
    HessOne,
    /// The Lagrangian solution of the Chynoweth–Sewell form.
    CsGeneralized,
    /// A polynomial given by `--poly`; the form comes from `--input`.
    Poly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    Cs,
    S6,
}

/// A finished command: the report and its exit code.
pub struct Outcome {
    pub report: Value,
    pub code: i32,
    pub warnings: Vec<String>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotEffective => EXIT_NOT_EFFECTIVE,
        Error::Degenerate => EXIT_DEGENERATE,
        Error::Invalid(_)
        | Error::GradeOverflow(..)
        | Error::GradeTooLow { .. }
        | Error::GradeTooHigh { .. }
        | Error::WrongGrade { .. }
        | Error::DegenerateSymplectic
        | Error::NotPolynomial => EXIT_INVALID,
        _ => EXIT_FAIL,
    }
}

/// Flattens a report into `key.path = value` lines.
pub fn to_text(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) if !m.is_empty() => m.iter().for_each(|(k, x)| walk(&join(k), x, out)),
            Value::Array(a) if !a.is_empty() && a.iter().any(|x| x.is_object() || x.is_array()) => {
                a.iter().enumerate().for_each(|(i, x)| walk(&join(&i.to_string()), x, out))
            }
            Value::String(s) => out.push_str(&format!("{prefix} = {s}\n")),
            other => out.push_str(&format!("{prefix} = {other}\n")),
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}

fn read_input(cli: &Cli, stdin: &mut dyn Read) -> Result<String, Error> {
    let mut text = String::new();
    match cli.input.as_deref() {
        None | Some("-") => stdin.read_to_string(&mut text).map(|_| ()),
        Some(path) => std::fs::File::open(path).and_then(|mut f| f.read_to_string(&mut text).map(|_| ())),
    }
    .map_err(|e| Error::Invalid(format!("cannot read input: {e}")))?;
    Ok(text)
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let needs_input = match &cli.command {
        Command::Classify { .. } | Command::Split | Command::CheckStructure => true,
        Command::CheckSolution { solution, .. } => *solution == SolutionKind::Poly || cli.input.is_some(),
        Command::Demo { .. } => false,
    };
    let doc = if needs_input {
        match read_input(&cli, stdin).and_then(|t| FormDocument::parse(&t)) {
            Ok(d) => Some(d),
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                return EXIT_INVALID;
            }
        }
    } else {
        None
    };
    match commands::dispatch(&cli, doc.as_ref()) {
        Ok(o) => {
            for w in &o.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&o.report).expect("serializable") + "\n",
                Format::Text => to_text(&o.report),
            };
            let _ = out.write_all(text.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
