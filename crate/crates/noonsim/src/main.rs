use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use noonsim::config::{parse_config, Format};
use noonsim::formats::to_json;
use noonsim::run::run;

#[derive(Debug, Parser)]
#[command(
    name = "noonsim",
    version,
    about = "Multiport beamsplitter NOON-state simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file.
    Run {
        config: PathBuf,
        /// Print the resolved scenario as JSON and exit without running it.
        #[arg(long)]
        echo_config: bool,
        /// Override a scenario field; the value is parsed as JSON when possible.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Write here instead of the scenario's output_path or stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let Command::Run {
        config,
        echo_config,
        mut set,
        format,
        output,
    } = Cli::parse().command;

    if let Some(f) = format {
        let name = match f {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        set.push(format!("format={name}"));
    }
    if let Some(path) = output {
        let quoted = serde_json::to_string(&path.to_string_lossy()).expect("string serializes");
        set.push(format!("output_path={quoted}"));
    }

    let loaded = match parse_config(&config, &set) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    let scenario = loaded.scenario;

    if echo_config {
        print!("{}", to_json(&scenario));
        return ExitCode::SUCCESS;
    }

    let out = match run(&scenario) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };

    let written = match &scenario.output_path {
        Some(path) => {
            std::fs::write(path, &out.body).map_err(|e| format!("cannot write {path}: {e}"))
        }
        None => std::io::stdout()
            .lock()
            .write_all(out.body.as_bytes())
            .map_err(|e| format!("cannot write to stdout: {e}")),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }

    match out.violation {
        Some(v) => {
            eprintln!("error: {v}");
            ExitCode::from(v.exit_code())
        }
        None => ExitCode::SUCCESS,
    }
}
