//! The `mdslab` command-line tool.
//!
//! Exit codes: 0 on success, 2 for bad arguments, bad input files and I/O
//! failures, 3 when a numerical routine fails to converge.

pub mod args;
pub mod claims;
pub mod commands;
pub mod config;
pub mod record;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::Parser;

use mdslab_core::{Error, Result};

use args::Cli;
use config::{sha256_hex, ExperimentConfig};
use record::RunRecord;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    if argv.len() <= 1 {
        let _ = <Cli as clap::CommandFactory>::command().print_help();
        return EXIT_USAGE;
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => return clap_exit(e),
    };

    let (command, config_hash) = match cli.config {
        Some(path) => {
            let loaded = std::fs::read_to_string(&path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
                .and_then(|text| ExperimentConfig::from_json(&text));
            let config = match loaded {
                Ok(c) => c,
                Err(e) => return report(&e),
            };
            let canonical = serde_json::to_string(&config).expect("config serializes");
            match Cli::try_parse_from(config.to_args()) {
                Ok(Cli { command: Some(cmd), .. }) => (cmd, sha256_hex(canonical.as_bytes())),
                Ok(_) => return report(&Error::InvalidArgument("config names no command".into())),
                Err(e) => return clap_exit(e),
            }
        }
        None => match cli.command {
            Some(cmd) => (cmd, sha256_hex(normalized_args(&argv).as_bytes())),
            None => {
                let _ = <Cli as clap::CommandFactory>::command().print_help();
                return EXIT_USAGE;
            }
        },
    };

    match execute(&command, config_hash) {
        Ok(()) => EXIT_OK,
        Err(e) => report(&e),
    }
}

fn execute(command: &args::Command, config_hash: String) -> Result<()> {
    let start = Instant::now();
    let output = commands::execute(command)?;
    let name = commands::command_name(command);
    match commands::out_path(command) {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(output.stdout_bytes().as_bytes()).map_err(|e| Error::Io(e.to_string()))?;
        }
        Some(out) => {
            let bytes = output.file_bytes();
            std::fs::write(out, &bytes).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
            let record = RunRecord {
                config_hash,
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                command: name.to_string(),
                claim: claims::claim_for(name).map(|c| c.statement.to_string()).unwrap_or_default(),
                wall_time_seconds: start.elapsed().as_secs_f64(),
                result: out.display().to_string(),
                result_sha256: sha256_hex(bytes.as_bytes()),
            };
            record.write(out)?;
        }
    }
    Ok(())
}

/// Arguments after the program name, minus the ones that cannot change the
/// result (`--jobs`), joined with NUL.
fn normalized_args(argv: &[OsString]) -> String {
    let mut kept = Vec::new();
    let mut skip_value = false;
    for arg in argv.iter().skip(1) {
        let arg = arg.to_string_lossy();
        if skip_value {
            skip_value = false;
            continue;
        }
        if arg == "--jobs" {
            skip_value = true;
            continue;
        }
        if arg.starts_with("--jobs=") {
            continue;
        }
        kept.push(arg.into_owned());
    }
    kept.join("\0")
}

fn clap_exit(e: clap::Error) -> i32 {
    let _ = e.print();
    if e.use_stderr() {
        EXIT_USAGE
    } else {
        // --help and --version
        EXIT_OK
    }
}

fn report(e: &Error) -> i32 {
    eprintln!("error: {e}");
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn every_subcommand_has_a_claim() {
        let cli = Cli::command();
        let mut names = Vec::new();
        for group in cli.get_subcommands() {
            for sub in group.get_subcommands() {
                names.push(format!("{} {}", group.get_name(), sub.get_name()));
            }
        }
        names.sort();
        let mut claimed: Vec<String> = claims::CLAIMS.iter().map(|c| c.command.to_string()).collect();
        claimed.sort();
        assert_eq!(names, claimed);
    }

    #[test]
    fn jobs_do_not_change_the_hash() {
        let a: Vec<OsString> = ["mdslab", "stability", "converge", "--sizes", "8,16", "--jobs", "4"]
            .iter()
            .map(Into::into)
            .collect();
        let b: Vec<OsString> = ["mdslab", "stability", "converge", "--sizes", "8,16"].iter().map(Into::into).collect();
        assert_eq!(normalized_args(&a), normalized_args(&b));
    }

    #[test]
    fn grammar_is_consistent() {
        Cli::command().debug_assert();
    }
}
