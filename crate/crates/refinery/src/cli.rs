//! The `refinery` command line.
//!
//! Exit status: 0 when the check passes, 1 when it fails, 2 for anything
//! that prevented a verdict (bad usage, unreadable or invalid spec, unknown
//! names, an exhausted search budget).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use refinery_core::{
    check_absorption, check_downward_simulation, check_noisy_refinement, check_output_abstraction,
    check_output_refinement, check_prob_refinement, degree_report, search_report, CheckReport, Error, Prob,
};

use crate::dsl::{parse_spec_bytes, Diagnostic};
use crate::report::{render_json, render_text};
use crate::workspace::{Unresolved, Workspace};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "refinery", version, about = "Check refinement between finite specifications")]
pub struct Cli {
    /// Spec file to load.
    #[arg(short, long, global = true, value_name = "FILE")]
    pub spec: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

fn positive(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(0) => Err("budget must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check output refinement through a given transformer.
    CheckOutput {
        #[arg(long = "abstract")]
        abstract_op: String,
        #[arg(long)]
        concrete: String,
        #[arg(long)]
        ot: String,
    },
    /// Search for an output transformer making CONCRETE refine ABSTRACT.
    SearchOt {
        #[arg(long = "abstract")]
        abstract_op: String,
        #[arg(long)]
        concrete: String,
        #[arg(long, default_value = "1000000", value_parser = positive)]
        budget: u64,
    },
    /// Check that ABSTRACT is an output abstraction of CONCRETE, i.e. that
    /// ABSTRACT output-refines CONCRETE.
    CheckAbstraction {
        #[arg(long = "abstract")]
        abstract_op: String,
        #[arg(long)]
        concrete: String,
        #[arg(long, default_value = "1000000", value_parser = positive)]
        budget: u64,
    },
    /// Check data refinement between two data types by downward simulation.
    CheckData {
        #[arg(long = "abstract")]
        abstract_dt: String,
        #[arg(long)]
        concrete: String,
        #[arg(long)]
        retrieve: String,
    },
    /// Check that a probabilistic operation refines a relational one.
    CheckProb {
        #[arg(long = "abstract")]
        abstract_op: String,
        #[arg(long)]
        prob: String,
    },
    /// Compute the refinement degree of a probabilistic operation.
    Degree {
        #[arg(long)]
        target: String,
        #[arg(long)]
        prob: String,
        /// Degree below which the check fails.
        #[arg(long, default_value = "0")]
        min_degree: Prob,
    },
    /// Check a noise model's absorption axiom.
    NoiseCheck {
        #[arg(long)]
        model: String,
    },
    /// Check refinement up to noise.
    CheckNoisy {
        #[arg(long = "abstract")]
        abstract_op: String,
        #[arg(long)]
        concrete: String,
        #[arg(long)]
        model: String,
    },
    /// Parse and resolve the spec file.
    Validate,
}

enum Failure {
    Usage(String),
    Diagnostics(Vec<Diagnostic>),
    Unresolved(Unresolved),
    Check(Error),
}

impl From<Unresolved> for Failure {
    fn from(u: Unresolved) -> Self {
        Failure::Unresolved(u)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Check(e)
    }
}

struct Outcome {
    report: CheckReport,
    notes: Vec<String>,
}

impl From<CheckReport> for Outcome {
    fn from(report: CheckReport) -> Self {
        Outcome { report, notes: Vec::new() }
    }
}

fn holds(b: bool) -> &'static str {
    if b {
        "holds"
    } else {
        "fails"
    }
}

fn dispatch(ws: &Workspace, command: &Command, warnings: usize) -> Result<Outcome, Failure> {
    let outcome = match command {
        Command::CheckOutput { abstract_op, concrete, ot } => {
            let (a, c, t) = (ws.operation(abstract_op)?, ws.operation(concrete)?, ws.transformer(ot)?);
            check_output_refinement(a, c, t)?.into()
        }
        Command::SearchOt { abstract_op, concrete, budget } => {
            let (a, c) = (ws.operation(abstract_op)?, ws.operation(concrete)?);
            with_transformer_note(search_report(a, c, *budget)?)
        }
        Command::CheckAbstraction { abstract_op, concrete, budget } => {
            let (a, c) = (ws.operation(abstract_op)?, ws.operation(concrete)?);
            with_transformer_note(check_output_abstraction(a, c, *budget)?)
        }
        Command::CheckData { abstract_dt, concrete, retrieve } => {
            let (a, c, r) = (ws.datatype(abstract_dt)?, ws.datatype(concrete)?, ws.retrieve(retrieve)?);
            check_downward_simulation(a, c, r)?.into()
        }
        Command::CheckProb { abstract_op, prob } => {
            check_prob_refinement(ws.operation(abstract_op)?, ws.prob_operation(prob)?)?.into()
        }
        Command::Degree { target, prob, min_degree } => {
            if !min_degree.is_probability() {
                return Err(Failure::Usage(format!("--min-degree {min_degree} is not a probability")));
            }
            degree_report(ws.operation(target)?, ws.prob_operation(prob)?, min_degree)?.into()
        }
        Command::NoiseCheck { model } => check_absorption(ws.noise_model(model)?).into(),
        Command::CheckNoisy { abstract_op, concrete, model } => {
            let (a, c, m) = (ws.operation(abstract_op)?, ws.operation(concrete)?, ws.noise_model(model)?);
            let n = check_noisy_refinement(a, c, m)?;
            let notes = vec![
                format!("noise-match {}", holds(n.noise_match)),
                format!("oot-functionality {}", holds(n.oot_functional)),
            ];
            Outcome { report: n.report, notes }
        }
        Command::Validate => {
            let mut notes = vec![ws.summary()];
            if warnings > 0 {
                notes.push(format!("{warnings} warning(s)"));
            }
            Outcome { report: CheckReport::pass("validate"), notes }
        }
    };
    Ok(outcome)
}

fn with_transformer_note(report: CheckReport) -> Outcome {
    let notes = report.transformer.iter().map(|t| format!("found transformer {}", t.name())).collect();
    Outcome { report, notes }
}

fn load(path: &std::path::Path) -> Result<(Workspace, Vec<Diagnostic>), Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    match std::str::from_utf8(&bytes) {
        Ok(src) => {
            crate::dsl::parse_spec_with_warnings(src).map(|p| (p.workspace, p.warnings)).map_err(Failure::Diagnostics)
        }
        // reports where the bad bytes are
        Err(_) => Err(Failure::Diagnostics(parse_spec_bytes(&bytes).err().unwrap_or_default())),
    }
}

/// Runs the command line with an explicit color choice for text output.
pub fn run_with<I, T>(args: I, color: bool, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_PASS };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let spec_name = cli.spec.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
    let result = match &cli.spec {
        None => Err(Failure::Usage("no spec file given (use --spec FILE)".into())),
        Some(path) => load(path).and_then(|(ws, warnings)| {
            for w in &warnings {
                let _ = writeln!(err, "{spec_name}:{w}");
            }
            dispatch(&ws, &cli.command, warnings.len())
        }),
    };
    match result {
        Ok(Outcome { report, notes }) => {
            let text = match cli.format {
                Format::Json => render_json(&report) + "\n",
                Format::Text => render_text(&report, &notes, color),
            };
            let _ = out.write_all(text.as_bytes());
            if report.passed() {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(failure) => {
            let _ = match failure {
                Failure::Usage(m) => writeln!(err, "error: {m}"),
                Failure::Diagnostics(ds) => ds.iter().try_for_each(|d| writeln!(err, "{spec_name}:{d}")),
                Failure::Unresolved(u) => writeln!(err, "error: {u}"),
                Failure::Check(e @ Error::BudgetExhausted { .. }) => writeln!(err, "unknown: {e}"),
                Failure::Check(e) => writeln!(err, "error: {e}"),
            };
            EXIT_ERROR
        }
    }
}

/// Runs the command line; `REFINERY_COLOR=1` turns on ANSI color in text
/// output.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let color = std::env::var("REFINERY_COLOR").is_ok_and(|v| v == "1");
    run_with(args, color, out, err)
}
