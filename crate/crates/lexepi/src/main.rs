use std::process::ExitCode;

use clap::Parser;
use lexepi::cli::{run, Cli, OutputFormat};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = run(&cli);
    match cli.format {
        OutputFormat::Json => print!("{}", report.to_json()),
        OutputFormat::Text => print!("{}", report.to_text()),
    }
    if let Some(e) = &report.error {
        eprintln!("lexepi: {}", e.message);
    }
    ExitCode::from(report.exit_code as u8)
}
