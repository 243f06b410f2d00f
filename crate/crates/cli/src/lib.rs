//! Command-line surface for the toolkit: argument parsing, input loading,
//! dispatch and deterministic JSON reports.
//!
//! Exit codes: 0 for success or a positive answer, 1 for a mathematically
//! negative answer, 2 for any input error.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use tdk_core::{fixtures, TdkError};

mod commands;
mod render;
pub mod selftest;

/// Exit code and report text of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
    /// Set when the computation panicked; the report is then an `internal` error.
    pub panicked: bool,
}

/// Where `--pair FILE` and friends are read from.
pub trait Source {
    fn read(&self, path: &str) -> Result<String, String>;
}

/// The file system, falling back to the embedded fixtures by file name.
pub struct Files;

impl Source for Files {
    fn read(&self, path: &str) -> Result<String, String> {
        match std::fs::read_to_string(path) {
            Ok(s) => Ok(s),
            Err(e) => fixtures::get(path)
                .map(str::to_string)
                .ok_or_else(|| e.to_string()),
        }
    }
}

#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Io { path: String, message: String },
    Core(TdkError),
}

impl From<TdkError> for CliError {
    fn from(e: TdkError) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io { path, message } => write!(f, "cannot read {path}: {message}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn to_json(&self, file: Option<&str>) -> Value {
        let (kind, location) = match self {
            CliError::Usage(_) => ("usage", None),
            CliError::Io { path, .. } => {
                return json!({"error": "io", "location": path, "message": self.to_string()});
            }
            CliError::Core(e) => (e.kind(), e.location()),
        };
        let location = match (file, location) {
            (Some(f), Some(l)) => Some(format!("{f}: {l}")),
            (Some(f), None) => Some(f.to_string()),
            (None, l) => l,
        };
        json!({"error": kind, "location": location, "message": self.to_string()})
    }
}

pub(crate) type CliResult<T> = Result<T, CliError>;

/// A report and its exit code.
pub(crate) struct Report {
    pub code: i32,
    pub value: Value,
}

impl Report {
    pub fn ok(value: Value) -> Self {
        Report { code: 0, value }
    }

    pub fn answer(yes: bool, value: Value) -> Self {
        Report {
            code: if yes { 0 } else { 1 },
            value,
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "tdk",
    version,
    about = "Topological T-duality of torus bundles with flux"
)]
struct Cli {
    /// Compact JSON output (the default).
    #[arg(long, global = true)]
    json: bool,
    /// Human-readable rendering instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    pretty: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Debug, Default)]
pub(crate) struct SpaceInput {
    /// Base space document.
    #[arg(long, conflicts_with_all = ["builtin", "pair"])]
    pub base: Option<String>,
    /// Builtin space, e.g. `torus:3` or `sphere:2*sphere:1`.
    #[arg(long, conflicts_with = "pair")]
    pub builtin: Option<String>,
    /// Pair document; its bundle is used.
    #[arg(long)]
    pub pair: Option<String>,
}

#[derive(Args, Debug)]
pub(crate) struct BundleInput {
    #[command(flatten)]
    pub space: SpaceInput,
    /// Chern cocycles over the base, with `--base` or `--builtin`.
    #[arg(long, conflicts_with = "pair")]
    pub chern: Option<String>,
}

#[derive(Args, Debug)]
pub(crate) struct PairOrTriple {
    #[arg(long, conflicts_with = "triple")]
    pub pair: Option<String>,
    #[arg(long)]
    pub triple: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Cohomology groups of a base space or of a bundle's total space.
    Cohomology {
        #[command(flatten)]
        input: SpaceInput,
        #[arg(long)]
        deg: Option<usize>,
    },
    /// Koszul model of a torus bundle: dimensions, Chern classes, cohomology.
    Bundle {
        #[command(flatten)]
        input: BundleInput,
    },
    /// Pages of the Leray-Serre spectral sequence.
    Ss {
        #[command(flatten)]
        input: BundleInput,
        #[arg(long, default_value_t = 2)]
        page: usize,
        /// Only the slots of this total degree.
        #[arg(long)]
        deg: Option<usize>,
    },
    /// Whether the flux lies in the second filtration step.
    Dualizable {
        #[arg(long)]
        pair: String,
    },
    /// Constructs a T-dual triple.
    Dualize {
        #[arg(long)]
        pair: String,
    },
    /// Validates every condition on a triple.
    CheckTriple {
        #[arg(long)]
        triple: String,
    },
    /// Extensions of a pair with fixed dual Chern classes.
    Extensions {
        #[arg(long)]
        pair: String,
    },
    /// Membership and type of an O(n,n) element, optionally acting on a triple.
    Onn {
        #[arg(long)]
        check: String,
        #[arg(long)]
        triple: Option<String>,
    },
    /// Dimensions of twisted rational cohomology.
    Twisted {
        #[command(flatten)]
        input: PairOrTriple,
    },
    /// The T-duality transformation and whether it is an isomorphism.
    Tmap {
        #[command(flatten)]
        input: PairOrTriple,
    },
    /// Runs the acceptance table over the embedded fixtures.
    Selftest,
}

/// Runs with files read from disk (or the embedded fixtures).
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    run_with(args, &Files)
}

pub fn run_with<I, S>(args: I, source: &dyn Source) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    code: 0,
                    output: e.to_string(),
                    panicked: false,
                };
            }
            let err = CliError::Usage(e.kind().to_string());
            let mut v = err.to_json(None);
            v["message"] = json!(e.to_string().lines().next().unwrap_or_default());
            return Outcome {
                code: 2,
                output: finish(&v, false),
                panicked: false,
            };
        }
    };
    let pretty = cli.pretty;
    let mut ctx = commands::Ctx::new(source);
    match catch_unwind(AssertUnwindSafe(|| dispatch(cli.verb, &mut ctx))) {
        Ok(Ok(r)) => Outcome {
            code: r.code,
            output: finish(&r.value, pretty),
            panicked: false,
        },
        Ok(Err(e)) => Outcome {
            // a pair that has no dual is an answer, not bad input
            code: if matches!(e, CliError::Core(TdkError::NotDualizable { .. })) {
                1
            } else {
                2
            },
            output: finish(&e.to_json(ctx.current_file()), pretty),
            panicked: false,
        },
        Err(_) => Outcome {
            code: 2,
            output: finish(
                &json!({"error": "internal", "location": ctx.current_file(), "message": "internal error"}),
                pretty,
            ),
            panicked: true,
        },
    }
}

fn finish(v: &Value, pretty: bool) -> String {
    if pretty {
        render::text(v)
    } else {
        format!("{v}\n")
    }
}

fn dispatch(verb: Verb, ctx: &mut commands::Ctx) -> CliResult<Report> {
    match verb {
        Verb::Cohomology { input, deg } => commands::cohomology(ctx, &input, deg),
        Verb::Bundle { input } => commands::bundle(ctx, &input),
        Verb::Ss { input, page, deg } => commands::ss(ctx, &input, page, deg),
        Verb::Dualizable { pair } => commands::dualizable(ctx, &pair),
        Verb::Dualize { pair } => commands::dualize(ctx, &pair),
        Verb::CheckTriple { triple } => commands::check_triple(ctx, &triple),
        Verb::Extensions { pair } => commands::extensions(ctx, &pair),
        Verb::Onn { check, triple } => commands::onn(ctx, &check, triple.as_deref()),
        Verb::Twisted { input } => commands::twisted(ctx, &input),
        Verb::Tmap { input } => commands::tmap(ctx, &input),
        Verb::Selftest => Ok(selftest::report()),
    }
}
