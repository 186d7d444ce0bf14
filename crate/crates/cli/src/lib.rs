//! Command-line front end: classification runs, fixture verification, solid
//! identification and report rendering.

pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use symspread_core::classify::{Classifier, Config, MAX_DIM};
use symspread_core::fixture::{verify_representatives, FixtureList, VerifyReport};
use symspread_core::semifield::{
    default_dickson, field_algebra, identify, symmetric_spread_solid, CubicalArray, SpreadSolid,
};
use symspread_core::{Error, Field};

use report::ResultDoc;

pub const DEFAULT_ORACLE_BOUND: u64 = 1 << 20;

#[derive(Debug, Parser)]
#[command(
    name = "symspread",
    version,
    about = "Orbits of semifield subspaces of symmetric 4x4 matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify semifield subspaces of PG(9,q) up to the chosen dimension.
    Classify(ClassifyArgs),
    /// Check a list of parameterized subspaces for the semifield property.
    Verify(VerifyArgs),
    /// Find the orbit of a semifield solid, given directly or as a commutative algebra.
    Identify(IdentifyArgs),
    /// Render a classification result file.
    Report(ReportArgs),
    /// Print the field or Dickson algebra of order q^4.
    Algebra(AlgebraArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Latex,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Bytes allowed for the point table and rank array.
    #[arg(long, default_value_t = 8 << 30)]
    pub memory_budget: u64,
    /// Stop after this many seconds, keeping completed levels in the checkpoint.
    #[arg(long)]
    pub time_limit: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long, default_value_t = MAX_DIM)]
    pub max_dim: usize,
    /// State file, written after each level and resumed from when present.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Result file; without it the result goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub fixture: PathBuf,
    /// Expected field order; must match the fixture header.
    #[arg(long)]
    pub q: Option<u32>,
    /// Classification state file used to certify inequivalence.
    #[arg(long)]
    pub classification: Option<PathBuf>,
    /// Classify in-process to certify inequivalence.
    #[arg(long, conflicts_with = "classification")]
    pub classify: bool,
    /// Largest |PGL(4,q)| for which pairwise exhaustive search is used.
    #[arg(long, default_value_t = DEFAULT_ORACLE_BOUND)]
    pub oracle_bound: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    /// Algebra file (`q=.. basis=..` header) or one-item solid fixture.
    pub input: PathBuf,
    /// Classification state file; classified in-process when absent.
    #[arg(long)]
    pub classification: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// JSON result written by `classify --format json`.
    pub result: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Only this dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgebraKind {
    Field,
    Dickson,
}

#[derive(Debug, Args)]
pub struct AlgebraArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long, value_enum, default_value = "field")]
    pub kind: AlgebraKind,
    /// Print the symmetric spread solid as a fixture instead of the array.
    #[arg(long)]
    pub solid: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Core { path: PathBuf, source: Error },
    #[error(transparent)]
    Run(#[from] Error),
    #[error("{path}: invalid JSON: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

impl CliError {
    fn core(&self) -> Option<&Error> {
        match self {
            CliError::Core { source, .. } | CliError::Run(source) => Some(source),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "parse",
            _ => match self.core() {
                Some(Error::MemoryBudgetExceeded { .. }) => "memory_budget",
                Some(Error::OracleBoundExceeded { .. }) => "oracle_bound",
                Some(Error::Timeout { .. }) => "timeout",
                Some(Error::Parse { .. }) => "parse",
                Some(Error::Io(_)) => "io",
                Some(Error::Invariant(_) | Error::UnexpectedOrbitCount { .. } | Error::NotClosed) => "invariant",
                Some(Error::UnsupportedOrder(_)) => "unsupported_order",
                Some(Error::FieldMismatch { .. }) => "field_mismatch",
                Some(Error::NotFound(_)) => "not_found",
                _ => "input",
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "memory_budget" | "oracle_bound" | "timeout" => 3,
            "parse" => 4,
            "invariant" => 5,
            _ => 2,
        }
    }

    /// One-line JSON record for stderr.
    pub fn record(&self) -> String {
        serde_json::to_string(&ErrorRecord {
            error: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        })
        .expect("serializable")
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Exit status when a verification finds failing items or a count mismatch.
pub const EXIT_CHECK_FAILED: i32 = 1;

/// Runs one command, writing its primary output to `out`; returns the exit status.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<i32> {
    match cli.command {
        Command::Classify(a) => cmd_classify(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Identify(a) => cmd_identify(&a, out),
        Command::Report(a) => cmd_report(&a, out),
        Command::Algebra(a) => cmd_algebra(&a, out),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes())
        .and_then(|_| {
            if text.ends_with('\n') {
                Ok(())
            } else {
                out.write_all(b"\n")
            }
        })
        .map_err(|e| CliError::Run(e.into()))
}

fn config(q: u32, max_dim: usize, run: &RunArgs, seed: u64, checkpoint: Option<PathBuf>) -> CliResult<Config> {
    Field::new(q)?;
    if max_dim > MAX_DIM {
        return Err(CliError::Config(format!("--max-dim must be between 0 and {MAX_DIM}")));
    }
    if run.memory_budget == 0 {
        return Err(CliError::Config("--memory-budget must be positive".into()));
    }
    if run.time_limit == Some(0) {
        return Err(CliError::Config("--time-limit must be positive".into()));
    }
    Ok(Config {
        max_dim,
        memory_budget: run.memory_budget,
        workers: run.workers,
        seed,
        time_limit: run.time_limit.map(Duration::from_secs),
        checkpoint,
    })
}

/// Classifier for `q` that covers dimensions up to `dim`, from a state file or computed.
fn classifier(q: u32, dim: usize, state: Option<&Path>, run: &RunArgs) -> CliResult<Classifier> {
    if let Some(p) = state {
        if !p.exists() {
            return Err(CliError::Io {
                path: p.to_owned(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "classification state not found"),
            });
        }
    }
    let cfg = config(q, dim, run, Config::default().seed, state.map(Path::to_owned))?;
    let mut c = Classifier::new(q, cfg).map_err(|source| match (state, source) {
        (Some(p), source @ (Error::Parse { .. } | Error::FieldMismatch { .. })) => CliError::Core {
            path: p.to_owned(),
            source,
        },
        (_, source) => source.into(),
    })?;
    if c.levels_done() <= dim {
        c.run()?;
    }
    Ok(c)
}

fn cmd_classify(a: &ClassifyArgs, out: &mut dyn Write) -> CliResult<i32> {
    let cfg = config(a.q, a.max_dim, &a.run, a.seed, a.checkpoint.clone())?;
    let mut c = Classifier::new(a.q, cfg)?;
    c.run()?;
    let doc = ResultDoc::from_result(&c.result());
    let rendered = match a.format {
        Format::Json => doc.to_json(),
        other => doc.render(other, None),
    };
    match &a.out {
        Some(path) => {
            write(path, &rendered)?;
            emit(out, &doc.summary_table())?;
        }
        None => emit(out, &rendered)?,
    }
    Ok(0)
}

#[derive(Serialize)]
struct VerifyJson {
    q: u32,
    dim: usize,
    claimed_count: usize,
    items: Vec<VerifyItemJson>,
    passed: usize,
    distinct_invariants: usize,
    distinct_orbits: Option<usize>,
    certification: &'static str,
    pairwise_distinct: bool,
    all_pass: bool,
}

#[derive(Serialize)]
struct VerifyItemJson {
    index: usize,
    semifield: bool,
    min_rank: u8,
    invariant: String,
    orbit: Option<usize>,
}

fn verify_json(r: &VerifyReport) -> String {
    use symspread_core::fixture::Certification;
    let doc = VerifyJson {
        q: r.q,
        dim: r.dim,
        claimed_count: r.claimed_count,
        items: r
            .items
            .iter()
            .map(|it| VerifyItemJson {
                index: it.index,
                semifield: it.semifield,
                min_rank: it.min_rank,
                invariant: it.invariant.to_string(),
                orbit: it.orbit.map(|k| k.index),
            })
            .collect(),
        passed: r.passed,
        distinct_invariants: r.distinct_invariants,
        distinct_orbits: r.distinct_orbits,
        certification: match r.certification {
            Certification::Classified => "classification",
            Certification::Oracle => "exhaustive",
            Certification::NotCertified => "none",
        },
        pairwise_distinct: r.pairwise_distinct,
        all_pass: r.all_pass(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

/// Verifies every list in a fixture file.
pub fn verify_file(a: &VerifyArgs) -> CliResult<Vec<VerifyReport>> {
    let text = read(&a.fixture)?;
    let lists = FixtureList::parse_all(&text).map_err(|source| CliError::Core {
        path: a.fixture.clone(),
        source,
    })?;
    let mut reports = Vec::new();
    for list in &lists {
        if let Some(q) = a.q {
            if q != list.q {
                return Err(Error::FieldMismatch {
                    expected: q,
                    found: list.q,
                }
                .into());
            }
        }
        let c = if a.classification.is_some() || a.classify {
            Some(classifier(list.q, list.dim(), a.classification.as_deref(), &a.run)?)
        } else {
            None
        };
        reports.push(verify_representatives(list, c.as_ref(), Some(a.oracle_bound))?);
    }
    Ok(reports)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult<i32> {
    let reports = verify_file(a)?;
    let rendered = match a.format {
        Format::Json => {
            let docs: Vec<serde_json::Value> = reports
                .iter()
                .map(|r| serde_json::from_str(&verify_json(r)).expect("valid"))
                .collect();
            serde_json::to_string_pretty(&docs).expect("serializable")
        }
        _ => reports.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n\n"),
    };
    match &a.out {
        Some(path) => write(path, &rendered)?,
        None => emit(out, &rendered)?,
    }
    Ok(if reports.iter().all(VerifyReport::all_pass) {
        0
    } else {
        EXIT_CHECK_FAILED
    })
}

/// Reads an algebra (turned into its symmetric spread solid) or a one-item solid fixture.
pub fn read_solid(path: &Path) -> CliResult<(Field, SpreadSolid)> {
    let text = read(path)?;
    let at = |source| CliError::Core {
        path: path.to_owned(),
        source,
    };
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if first.contains("basis=") {
        let a = CubicalArray::from_text(&text).map_err(at)?;
        let s = symmetric_spread_solid(&a)?;
        Ok((a.field().clone(), s))
    } else {
        let list = FixtureList::parse(&text).map_err(at)?;
        if list.items.len() != 1 || list.dim() != MAX_DIM {
            return Err(at(Error::Parse {
                line: 1,
                column: 1,
                message: "expected a single solid with parameters x,y,z,w".into(),
            }));
        }
        let f = list.field()?;
        let solid = list.subspace(&f, 0)?;
        if !solid.is_semifield(&f) {
            return Err(Error::SolidNotSemifield.into());
        }
        Ok((f, SpreadSolid { solid }))
    }
}

#[derive(Serialize)]
struct IdentifyJson {
    q: u32,
    orbit: usize,
    orbits: usize,
    witness: Vec<String>,
}

fn cmd_identify(a: &IdentifyArgs, out: &mut dyn Write) -> CliResult<i32> {
    let (f, solid) = read_solid(&a.input)?;
    let q = f.q();
    let c = classifier(q, MAX_DIM, a.classification.as_deref(), &a.run)?;
    let (orbit, g) = identify(&solid, &c)?;
    let orbits = c.result().counts[MAX_DIM];
    let f = c.field();
    let rows: Vec<String> = g
        .matrix()
        .iter()
        .map(|r| r.iter().map(|&x| f.render(x)).collect::<Vec<_>>().join(" "))
        .collect();
    let rendered = match a.format {
        Format::Json => serde_json::to_string_pretty(&IdentifyJson {
            q,
            orbit,
            orbits,
            witness: rows,
        })
        .expect("serializable"),
        _ => format!("orbit {orbit} of {orbits}\nwitness:\n{}", rows.join("\n")),
    };
    emit(out, &rendered)?;
    Ok(0)
}

fn cmd_report(a: &ReportArgs, out: &mut dyn Write) -> CliResult<i32> {
    let text = read(&a.result)?;
    let doc: ResultDoc = serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: a.result.clone(),
        source,
    })?;
    doc.check().map_err(|source| CliError::Core {
        path: a.result.clone(),
        source,
    })?;
    if let Some(d) = a.dim {
        if d >= doc.levels.len() {
            return Err(CliError::Config(format!("result has no dimension {d}")));
        }
    }
    let rendered = doc.render(a.format, a.dim);
    match &a.out {
        Some(path) => write(path, &rendered)?,
        None => emit(out, &rendered)?,
    }
    Ok(0)
}

fn cmd_algebra(a: &AlgebraArgs, out: &mut dyn Write) -> CliResult<i32> {
    let alg = match a.kind {
        AlgebraKind::Field => field_algebra(&Field::new(a.q)?)?,
        AlgebraKind::Dickson => default_dickson(a.q)?,
    };
    let text = if a.solid {
        let s = symmetric_spread_solid(&alg)?;
        FixtureList::from_subspaces(alg.field(), &[s.solid], 1)?.to_text()?
    } else {
        alg.to_text()
    };
    emit(out, &text)?;
    Ok(0)
}
