//! Command-line interface: configuration, the analysis pipeline, example
//! verification, symmetries, the survey and exports.

pub mod config;
pub mod export;
pub mod golden;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

pub use config::{example_config, symmetry_config, RunConfig};
pub use export::{export, ExportFormat};
pub use golden::{DiffEntry, Golden};
pub use report::{analyze, recheck, Analysis, SailReportDocument};

use crate::error::{Error, Result};
use crate::quotient::fingerprint;
use crate::sail::PatchOptions;
use crate::survey::{run_survey, Reference, SurveyReport, DEFAULT_CAP};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// Result differs from the expected data.
    pub const MISMATCH: i32 = 1;
    pub const SYMMETRY: i32 = 2;
    /// Survey finished with unresolved candidates.
    pub const PARTIAL: i32 = 3;
    pub const RESOURCE: i32 = 4;
    pub const CLASSIFICATION: i32 = 5;
    pub const INVARIANT: i32 = 6;
    pub const USAGE: i32 = 64;
    pub const IO: i32 = 74;
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Symmetry(_) => exit::SYMMETRY,
        Error::Resource(_) | Error::Budget(_) => exit::RESOURCE,
        Error::Classification(_) => exit::CLASSIFICATION,
        Error::Parse(_) => exit::USAGE,
        Error::Io(_) => exit::IO,
        Error::Domain(_)
        | Error::EndpointRoot(_)
        | Error::Overflow(_)
        | Error::Evaluation(_)
        | Error::Degenerate(_)
        | Error::Invariant(_)
        | Error::Contract(_)
        | Error::Generator(_) => exit::INVARIANT,
    }
}

/// Worker count for the parallel parts; nothing else is read from the
/// environment.
pub const WORKERS_ENV: &str = "KLEIN_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "kleinsail", version, about = "Klein sails of hyperbolic operators on Z^4")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Max-norm cap on the sail vertices walked to.
    #[arg(long)]
    pub bound: Option<i64>,
    /// Length of the generator words applied to the seeds.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Bits of precision for log-coordinates.
    #[arg(long)]
    pub precision: Option<u32>,
    /// Half-width of the exponent box for orbit searches.
    #[arg(long)]
    pub exponent_box: Option<i64>,
    /// Re-derive every number of the produced document from its vertices.
    #[arg(long)]
    pub recheck: bool,
    /// Write the main output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        let s = &mut cfg.sail;
        s.bound = self.bound.unwrap_or(s.bound);
        s.depth = self.depth.unwrap_or(s.depth);
        s.precision = self.precision.unwrap_or(s.precision);
        s.exponent_box = self.exponent_box.unwrap_or(s.exponent_box);
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline on a configuration and emit the report.
    Analyze {
        config: PathBuf,
        #[command(flatten)]
        o: Overrides,
    },
    /// Compare a shipped example against its reference data.
    VerifyExample {
        n: u8,
        #[command(flatten)]
        o: Overrides,
    },
    /// Check that a matrix permutes the face classes of a sail.
    Symmetry {
        /// Configuration with a [symmetry] section; the shipped one by default.
        config: Option<PathBuf>,
        #[command(flatten)]
        o: Overrides,
    },
    /// Classify all matrices with entry absolute sum below the bound.
    Survey {
        max_abs_sum: i64,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a report document.
    Export {
        document: PathBuf,
        /// json, off or gluing.
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        recheck: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// What a command printed and how it ended.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn emit(out: &Option<PathBuf>, text: String, o: &mut Outcome) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, &text),
        None => {
            o.stdout.push_str(&text);
            Ok(())
        }
    }
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("partial");
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn document(a: &Analysis, recheck_doc: bool) -> Result<SailReportDocument> {
    let doc = a.document(a.symmetry()?)?;
    if recheck_doc {
        recheck(&doc)?;
    }
    Ok(doc)
}

pub fn cmd_analyze(mut cfg: RunConfig, o: &Overrides) -> Result<Outcome> {
    o.apply(&mut cfg);
    let a = analyze(&cfg)?;
    let doc = a.document(None)?;
    if o.recheck {
        recheck(&doc)?;
    }
    let mut out = Outcome { stderr: format!("{}\n", doc.fingerprint), ..Outcome::default() };
    emit(&o.out, doc.to_json()?, &mut out)?;
    Ok(out)
}

pub fn cmd_verify_example(n: u8, o: &Overrides) -> Result<Outcome> {
    let mut cfg = example_config(n)?;
    o.apply(&mut cfg);
    let a = analyze(&cfg)?;
    let mut out = Outcome::default();
    if a.golden_diff.is_empty() {
        let doc = document(&a, o.recheck)?;
        if let Some(p) = &o.out {
            write_atomic(p, &doc.to_json()?)?;
        }
    } else {
        out.code = exit::MISMATCH;
    }
    let summary = json!({
        "example": n,
        "match": a.golden_diff.is_empty(),
        "classes": a.classes.iter().map(|c| json!({
            "label": c.label,
            "distance": c.invariants.distance,
            "volume": c.invariants.volume,
            "vertices": c.invariants.vertices,
        })).collect::<Vec<_>>(),
        "diff": a.golden_diff,
    });
    out.stdout = format!("{}\n", serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?);
    Ok(out)
}

pub fn cmd_symmetry(mut cfg: RunConfig, o: &Overrides) -> Result<Outcome> {
    if cfg.symmetry.is_none() {
        return Err(Error::Parse("configuration has no [symmetry] section".into()));
    }
    o.apply(&mut cfg);
    let a = analyze(&cfg)?;
    let doc = document(&a, o.recheck)?;
    let sym = doc.symmetry.as_ref().expect("symmetry section present");
    let mut out = Outcome::default();
    let perm: Vec<String> = sym.images.iter().map(|i| format!("{}->{}", i.from, i.to)).collect();
    out.stderr = format!("{}\n", perm.join(" "));
    if sym.matches_expected == Some(false) {
        out.code = exit::MISMATCH;
    }
    emit(&o.out, doc.to_json()?, &mut out)?;
    Ok(out)
}

/// The first example as the survey's reference sail.
pub fn survey_reference() -> Result<Reference> {
    let cfg = example_config(1)?;
    let a = analyze(&cfg)?;
    Ok(Reference {
        orthant: a.orthant.clone(),
        generators: *a.group.generators(),
        seed: cfg.sail.seeds[0],
        fingerprint: fingerprint(&a.classes)?,
        // transported seeds can be large
        patch: PatchOptions { max_norm: i64::MAX, ..PatchOptions::default() },
    })
}

pub fn survey_exit_code(r: &SurveyReport) -> i32 {
    if r.mismatched > 0 || r.inequivalent > 0 {
        exit::MISMATCH
    } else if r.unresolved > 0 {
        exit::PARTIAL
    } else {
        exit::OK
    }
}

pub fn cmd_survey(bound: i64, checkpoint: Option<&Path>, out_path: &Option<PathBuf>) -> Result<Outcome> {
    let reference = survey_reference()?;
    let r = run_survey(bound, DEFAULT_CAP, &reference, checkpoint)?;
    let mut out = Outcome { code: survey_exit_code(&r), ..Outcome::default() };
    out.stderr = format!(
        "enumerated {} candidates {} matched {} mismatched {} inequivalent {} unresolved {}\n",
        r.enumerated,
        r.candidates.len(),
        r.matched,
        r.mismatched,
        r.inequivalent,
        r.unresolved
    );
    let mut text = serde_json::to_string_pretty(&r).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    emit(out_path, text, &mut out)?;
    Ok(out)
}

pub fn cmd_export(path: &Path, format: &str, recheck_doc: bool, out_path: &Option<PathBuf>) -> Result<Outcome> {
    let format: ExportFormat = format.parse()?;
    let doc = SailReportDocument::from_json(&std::fs::read_to_string(path)?)?;
    if recheck_doc {
        recheck(&doc)?;
    }
    let mut out = Outcome::default();
    emit(out_path, export(&doc, format)?, &mut out)?;
    Ok(out)
}

pub fn execute(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Analyze { config, o } => cmd_analyze(RunConfig::load(&config)?, &o),
        Command::VerifyExample { n, o } => cmd_verify_example(n, &o),
        Command::Symmetry { config, o } => {
            let cfg = match config {
                Some(p) => RunConfig::load(&p)?,
                None => symmetry_config()?,
            };
            cmd_symmetry(cfg, &o)
        }
        Command::Survey { max_abs_sum, checkpoint, out } => cmd_survey(max_abs_sum, checkpoint.as_deref(), &out),
        Command::Export { document, format, recheck, out } => cmd_export(&document, &format, recheck, &out),
    }
}

fn configure_workers() -> Result<()> {
    let Ok(v) = std::env::var(WORKERS_ENV) else { return Ok(()) };
    let n: usize = v.parse().map_err(|_| Error::Parse(format!("{WORKERS_ENV}={v} is not a count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Resource(e.to_string()))
}

/// Parses arguments, runs the command, prints its output and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            e.print().ok();
            return code;
        }
    };
    let result = configure_workers().and_then(|_| execute(cli.command));
    match result {
        Ok(o) => {
            print!("{}", o.stdout);
            eprint!("{}", o.stderr);
            std::io::stdout().flush().ok();
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
