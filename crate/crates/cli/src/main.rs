use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use jsnorm_cli::{run, Cli, Status};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli, &|p| std::fs::read_to_string(p));
    let text = outcome.render();
    let written = match &cli.common.out {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("jsnorm: cannot write report: {e}");
        return ExitCode::from(Status::Usage.code());
    }
    if outcome.status != Status::Ok {
        if let Some(e) = outcome.report.get("error").and_then(|e| e.as_str()) {
            eprintln!("jsnorm: {e}");
        }
    }
    ExitCode::from(outcome.status.code())
}
