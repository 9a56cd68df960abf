//! Command-line interface: validate, fan, cohomology, transition, preset.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use toric_transitions::error::Error;
use toric_transitions::input::{parse_input, serialize_input, InputDocument, Options, Request};
use toric_transitions::preset::{preset, preset_names};
use toric_transitions::report::{plain_text, run};

#[derive(Parser)]
#[command(
    name = "toric-transitions",
    about = "Exact toolkit for toric GIT wall crossings and extremal transitions of toric hypersurfaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the standing assumptions on a presentation.
    Validate(FileArg),
    /// Build the stacky fan and report its cones.
    Fan(FileArg),
    /// Compute the cohomology ring, optionally with narrow data and sectors.
    Cohomology {
        #[command(flatten)]
        file: FileArg,
        /// Also compute the narrow subspace from interior cones.
        #[arg(long)]
        narrow: bool,
        /// Also list the twisted sectors with their rings.
        #[arg(long)]
        sectors: bool,
    },
    /// Run the full transition pipeline.
    Transition {
        #[command(flatten)]
        file: FileArg,
        /// Write the JSON report to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a built-in input document.
    Preset {
        /// One of the built-in names.
        name: String,
        /// Parameters such as m=5, k=2, d=5 for the parametric presets.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
}

#[derive(Args)]
struct FileArg {
    /// Input JSON document.
    file: PathBuf,
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Parse(_) | Error::Schema(_) | Error::UnknownPreset(_) => 1,
                _ => 2,
            };
            ExitCode::from(code as u8)
        }
    }
}

fn dispatch() -> toric_transitions::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate(file) => run_request(&file, Request::Validate, None, None),
        Command::Fan(file) => run_request(&file, Request::Fan, None, None),
        Command::Cohomology { file, narrow, sectors } => run_request(
            &file,
            Request::Cohomology,
            Some(Options { narrow, sectors }),
            None,
        ),
        Command::Transition { file, out } => {
            run_request(&file, Request::Transition, None, out)
        }
        Command::Preset { name, params } => {
            let mut map = BTreeMap::new();
            for p in &params {
                let (k, v) = p.split_once('=').ok_or_else(|| {
                    Error::Schema(format!("parameter `{p}` is not of the form key=value"))
                })?;
                let value: i64 = v
                    .parse()
                    .map_err(|_| Error::Schema(format!("parameter value `{v}` is not an integer")))?;
                map.insert(k.to_string(), value);
            }
            let doc = preset(&name, &map).map_err(|e| match e {
                Error::UnknownPreset(n) => Error::UnknownPreset(format!(
                    "{n} (available: {})",
                    preset_names().join(", ")
                )),
                other => other,
            })?;
            print!("{}", serialize_input(&doc));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_request(
    file: &FileArg,
    request: Request,
    options: Option<Options>,
    out: Option<PathBuf>,
) -> toric_transitions::Result<ExitCode> {
    let text = std::fs::read_to_string(&file.file)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", file.file.display())))?;
    let mut doc: InputDocument = parse_input(&text)?;
    doc.request = request;
    if let Some(options) = options {
        doc.options = Some(options);
    }
    doc.check()?;
    let (report, code) = run(&doc);
    print!("{}", plain_text(&report));
    if let Some(path) = out {
        std::fs::write(&path, report.to_json())
            .map_err(|e| Error::Internal(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(ExitCode::from(code as u8))
}
