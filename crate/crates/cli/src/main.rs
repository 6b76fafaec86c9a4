//! `fstring`: run content, spectral and zeta checks on fractal strings from JSON configs.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fstring_core::harness::{
    bundled_examples, cmd_content, cmd_spectrum, cmd_string, cmd_verify, cmd_zeta, render_json,
    ExperimentConfig,
};
use fstring_core::spectral::records_to_csv;
use fstring_core::strings::{Precision, StringSpec};
use fstring_core::Error;
use serde_json::json;

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "fstring",
    version,
    about = "Fractal strings: contents, packing defects and spectral remainders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every labelled assertion for a config and emit a verification report.
    Verify {
        config: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate N, φ, δ and (φ−N)/f(√λ) on a geometric λ grid.
    Spectrum {
        config: PathBuf,
        #[arg(long)]
        lmin: f64,
        #[arg(long)]
        lmax: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Lower/upper Minkowski and S-content estimates with verdicts.
    Content { config: PathBuf },
    /// ζ(D), c_{1,D} and a w_k(D) table.
    Zeta {
        #[arg(long = "D", allow_negative_numbers = true)]
        d: f64,
    },
    /// First n lengths and the total length of a string.
    String {
        spec: PathBuf,
        #[arg(long)]
        n: u64,
    },
    /// Print a bundled example config (or list the names).
    Example { name: Option<String> },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Usage(String),
    Io(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn report(&self) -> (u8, serde_json::Value) {
        let (code, kind, category, message) = match self {
            Failure::Usage(m) => (EXIT_USAGE, "usage", "usage", m.clone()),
            Failure::Io(m) => (EXIT_IO, "io", "io", m.clone()),
            Failure::Core(e) => {
                let kind = match e {
                    Error::Argument(_) | Error::Construction(_) | Error::Domain(_) => "usage",
                    Error::Numeric { .. } | Error::Evaluation(_) | Error::Range(_) => "numeric",
                };
                let code = if kind == "usage" {
                    EXIT_USAGE
                } else {
                    EXIT_NUMERIC
                };
                (code, kind, e.category(), e.to_string())
            }
        };
        let mut body = json!({ "error": { "kind": kind, "category": category, "message": message, "exit_code": code } });
        if let Failure::Core(Error::Numeric { partial, .. }) = self {
            body["error"]["partial"] = json!(partial);
        }
        (code, body)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn load_config(path: &Path) -> Result<ExperimentConfig, Failure> {
    ExperimentConfig::from_json(&read(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<String, Failure> {
    let precision = Precision::from_env().map_err(|e| Failure::Usage(e.to_string()))?;
    match cli.command {
        Command::Verify { config, out } => {
            let report = cmd_verify(&load_config(&config)?, precision)?;
            let text = render_json(&report);
            match out {
                Some(path) => {
                    std::fs::write(&path, text + "\n").map_err(|e| {
                        Failure::Io(format!("cannot write {}: {e}", path.display()))
                    })?;
                    Ok(format!(
                        "part I {} · part II {} · {} flag(s) → {}",
                        if report.part_one_holds() {
                            "holds"
                        } else {
                            "fails"
                        },
                        if report.part_two_holds() {
                            "holds"
                        } else {
                            "fails"
                        },
                        report.consistency.flags.len(),
                        path.display()
                    ))
                }
                None => Ok(text),
            }
        }
        Command::Spectrum {
            config,
            lmin,
            lmax,
            steps,
            format,
        } => {
            let rows = cmd_spectrum(&load_config(&config)?, lmin, lmax, steps, precision)?;
            Ok(match format {
                Format::Csv => records_to_csv(&rows).trim_end().to_string(),
                Format::Json => render_json(&rows),
            })
        }
        Command::Content { config } => Ok(render_json(&cmd_content(&load_config(&config)?)?)),
        Command::Zeta { d } => Ok(render_json(&cmd_zeta(d)?)),
        Command::String { spec, n } => {
            let text = read(&spec)?;
            let spec: StringSpec = serde_json::from_str(&text).map_err(|e| {
                Failure::Usage(format!("{}: malformed string spec: {e}", spec.display()))
            })?;
            Ok(render_json(&cmd_string(&spec, n)?))
        }
        Command::Example { name } => {
            let examples = bundled_examples();
            match name {
                None => Ok(examples
                    .into_iter()
                    .map(|(n, _)| n)
                    .collect::<Vec<_>>()
                    .join("\n")),
                Some(name) => examples
                    .into_iter()
                    .find(|(n, _)| *n == name)
                    .map(|(_, c)| c.to_json())
                    .ok_or_else(|| Failure::Usage(format!("no bundled example named '{name}'"))),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let (code, body) = Failure::Usage(e.to_string().trim().to_string()).report();
            eprintln!("{body}");
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}").and_then(|_| out.flush()) {
                Ok(()) => ExitCode::SUCCESS,
                // a closed pipe (`| head`) is not a failure of the computation
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
                Err(e) => {
                    let (code, body) = Failure::Io(format!("cannot write output: {e}")).report();
                    eprintln!("{body}");
                    ExitCode::from(code)
                }
            }
        }
        Err(f) => {
            let (code, body) = f.report();
            eprintln!("{body}");
            ExitCode::from(code)
        }
    }
}
