mod args;
mod run;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run::run(&cli.command, &cli.config) {
        Ok(out) => {
            let written = match &cli.config.output {
                Some(path) => std::fs::write(path, &out.document),
                None => std::io::stdout().write_all(out.document.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("dydy: cannot write output: {e}");
                return ExitCode::from(1);
            }
            ExitCode::from(out.status.code())
        }
        Err(f) => {
            eprintln!("dydy: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
