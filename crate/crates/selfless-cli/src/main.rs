use clap::Parser;
use selfless_cli::{error_json, run, Cli, ReportEnvelope};
use std::process::ExitCode;
use std::time::Instant;

fn configure_threads(flag: Option<usize>) {
    let threads = flag.or_else(|| {
        std::env::var("SELFLESS_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(t) = threads.filter(|t| *t > 0) {
        // Ignore the error if a pool was already installed.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads(cli.threads);
    let config = cli.command.into_config();

    let start = Instant::now();
    match run(&config) {
        Ok(output) => {
            let envelope = ReportEnvelope::new(config, output.result, start.elapsed());
            let text = envelope.to_json();
            match &cli.output {
                Some(path) => {
                    if let Err(err) = std::fs::write(path, &text) {
                        eprintln!("{}", error_json(&err.into()));
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            if output.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("{}", error_json(&err));
            ExitCode::from(2)
        }
    }
}
