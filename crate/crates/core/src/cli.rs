//! The `statebdd` command line.
//!
//! ```text
//! statebdd validate <model>
//! statebdd gen feature <model> [-o out]
//! statebdd gen paths <model> [--max-len N] [-o out]
//! statebdd gen dot <model> [--highlight STATE] [-o out]
//! statebdd gen xmi <input> [-o out]
//! statebdd gen scdl <input> [-o out]
//! statebdd serve <model> [--addr HOST:PORT] [--persist FILE]
//! ```
//!
//! Inputs may be SCDL, XMI or feature text, picked by extension unless
//! `--format` says otherwise. Exit status is 0 on success, 1 for I/O,
//! usage and parse errors and 2 when the model does not validate.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Code, Error, Result};
use crate::feature::{parse_feature, recover_statechart, render_feature};
use crate::formats::dot::render_dot;
use crate::formats::scdl::{parse_scdl, parse_scdl_unchecked, render_scdl};
use crate::formats::xmi::{parse_xmi, parse_xmi_unchecked, render_xmi};
use crate::formats::Format;
use crate::model::{validate, StateId, Statechart};
use crate::scenario::{generate_path_suite, generate_transition_suite};
use crate::walkthrough::service::{self, ServeConfig, DEFAULT_ADDR};

#[derive(Debug, Parser)]
#[command(
    name = "statebdd",
    version,
    about = "Statecharts to GIVEN-WHEN-THEN scenarios and back"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a model and print its validation report.
    Validate(Input),
    /// Generate an artifact from a model.
    Gen {
        #[command(subcommand)]
        target: Target,
    },
    /// Start the walkthrough HTTP service.
    Serve {
        #[command(flatten)]
        input: Input,
        #[arg(long, env = "STATEBDD_ADDR", default_value = DEFAULT_ADDR)]
        addr: SocketAddr,
        /// Load sessions from and save them to this file.
        #[arg(long)]
        persist: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum Target {
    /// One scenario per transition.
    Feature(Output),
    /// One scenario per maximal transition-simple path.
    Paths {
        #[command(flatten)]
        out: Output,
        #[arg(long, default_value_t = 10)]
        max_len: usize,
    },
    /// Graphviz diagram.
    Dot {
        #[command(flatten)]
        out: Output,
        /// State id or name to highlight.
        #[arg(long)]
        highlight: Option<String>,
    },
    /// XMI document.
    Xmi(Output),
    /// SCDL text.
    Scdl(Output),
}

#[derive(Debug, Args)]
struct Input {
    model: PathBuf,
    /// Input format: scdl, xmi or feature.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Args)]
struct Output {
    #[command(flatten)]
    input: Input,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
}

/// Runs the command line `args` (program name first) and returns the exit
/// status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                1
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    match execute(cli.command, stdout) {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.code.is_model_error() {
                2
            } else {
                1
            }
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Validate(input) => {
            let chart = load(&input, false)?;
            let report = validate(&chart);
            emit(&format!("{report}\n"), None, stdout)?;
            Ok(if report.is_ok() { 0 } else { 2 })
        }
        Command::Gen { target } => {
            let (text, out) = match target {
                Target::Feature(o) => {
                    let chart = load(&o.input, true)?;
                    (
                        render_feature(&generate_transition_suite(&chart)?),
                        o.output,
                    )
                }
                Target::Paths { out: o, max_len } => {
                    let chart = load(&o.input, true)?;
                    (
                        render_feature(&generate_path_suite(&chart, max_len)?),
                        o.output,
                    )
                }
                Target::Dot { out: o, highlight } => {
                    let chart = load(&o.input, true)?;
                    let highlight = highlight.map(|h| resolve_state(&chart, &h)).transpose()?;
                    (render_dot(&chart, highlight.as_ref())?, o.output)
                }
                Target::Xmi(o) => {
                    let chart = load(&o.input, true)?;
                    (render_xmi(&chart)?, o.output)
                }
                Target::Scdl(o) => {
                    let chart = load(&o.input, true)?;
                    (render_scdl(&chart)?, o.output)
                }
            };
            emit(&text, out.as_deref(), stdout)?;
            Ok(0)
        }
        Command::Serve {
            input,
            addr,
            persist,
        } => {
            let chart = load(&input, true)?;
            let runtime = tokio::runtime::Runtime::new()
                .map_err(|e| Error::new(Code::Io, format!("cannot start runtime: {e}")))?;
            runtime.block_on(service::serve(chart, ServeConfig { addr, persist }))?;
            Ok(0)
        }
    }
}

/// Reads a model file. `checked` rejects charts that fail validation.
fn load(input: &Input, checked: bool) -> Result<Statechart> {
    let format = match &input.format {
        Some(name) => Format::from_name(name)?,
        None => Format::from_path(&input.model).ok_or_else(|| {
            Error::new(
                Code::InvalidArgument,
                format!(
                    "{}: cannot tell the format from the extension; use --format",
                    input.model.display()
                ),
            )
        })?,
    };
    let text = fs::read_to_string(&input.model)
        .map_err(|e| Error::new(Code::Io, format!("{}: {e}", input.model.display())))?;
    let in_file = |e: Error| Error {
        message: format!("{}: {}", input.model.display(), e.message),
        ..e
    };
    let chart = match (format, checked) {
        (Format::Scdl, true) => parse_scdl(&text),
        (Format::Scdl, false) => parse_scdl_unchecked(&text),
        (Format::Xmi, true) => parse_xmi(&text),
        (Format::Xmi, false) => parse_xmi_unchecked(&text),
        (Format::Feature, _) => parse_feature(&text).and_then(|set| recover_statechart(&set)),
    };
    chart.map_err(in_file)
}

fn resolve_state(chart: &Statechart, key: &str) -> Result<StateId> {
    let id = StateId::from(key);
    if chart.state(&id).is_some() {
        return Ok(id);
    }
    chart
        .state_by_name(key)
        .map(|s| s.id.clone())
        .ok_or_else(|| {
            Error::new(
                Code::UnknownState,
                format!("no state with id or name {key:?}"),
            )
        })
}

fn emit(text: &str, path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::new(Code::Io, format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::new(Code::Io, e.to_string())),
    }
}
