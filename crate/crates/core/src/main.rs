use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use quantum_bouncer::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            // a closed pipe is not a failure of the run
            for line in &report.summary {
                let _ = writeln!(out, "{line}");
            }
            for f in &report.files {
                let _ = writeln!(out, "wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = e.exit_code();
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error kind={} code={code}: {msg}", e.kind());
            ExitCode::from(code as u8)
        }
    }
}
