//! Command-line front end for `arctic-core`: verification suites, curve sampling and tables.

pub mod args;
pub mod curve;
pub mod error;
pub mod report;
pub mod tabulate;
pub mod verify;

use std::path::Path;

use args::{Cli, Command, Format, RunConfig};
use error::{CliError, CliResult, EXIT_CHECK_FAILED};

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io { path: "<stdout>".into(), source: e }),
                _ => Ok(()),
            }
        }
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Verify { suite, opts } => {
            let cfg = RunConfig::from_opts(opts)?;
            let prec = if cfg.prec_given { cfg.prec } else { 256 };
            let checks = verify::run_suite(*suite, cfg.params.as_ref(), prec);
            let text = match cfg.format.unwrap_or(Format::Text) {
                Format::Text => report::render_text(&checks),
                Format::Json => serde_json::to_string_pretty(&checks)? + "\n",
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    for c in &checks {
                        w.serialize(c)?;
                    }
                    String::from_utf8(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?).expect("utf-8")
                }
                Format::Svg => return Err(CliError::Usage("verify reports are text, json or csv".into())),
            };
            emit(cfg.out.as_deref(), &text)?;
            Ok(if checks.iter().all(|c| c.pass) { 0 } else { EXIT_CHECK_FAILED })
        }
        Command::Curve { opts } => {
            let cfg = RunConfig::from_opts(opts)?;
            let p = cfg.require_params()?;
            let ids = args::parse_branches(cfg.branches.as_deref(), p.model)?;
            let branches = curve::sample_branches(p, &ids, cfg.points.unwrap_or(200))?;
            let text = match cfg.format.unwrap_or(Format::Csv) {
                Format::Csv => curve::to_csv(&curve::rows(&branches, cfg.digits))?,
                Format::Json => serde_json::to_string_pretty(&curve::rows(&branches, cfg.digits))? + "\n",
                Format::Svg => curve::to_svg(p.model, &branches),
                Format::Text => return Err(CliError::Usage("curve output is csv, json or svg".into())),
            };
            emit(cfg.out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Tabulate { kind, opts } => {
            let cfg = RunConfig::from_opts(opts)?;
            let t = tabulate::tabulate(*kind, &cfg)?;
            let text = match cfg.format.unwrap_or(Format::Csv) {
                Format::Csv => t.to_csv()?,
                Format::Json => t.to_json()?,
                _ => return Err(CliError::Usage("tables are csv or json".into())),
            };
            emit(cfg.out.as_deref(), &text)?;
            Ok(0)
        }
    }
}
