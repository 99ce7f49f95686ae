use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use gvturan_cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.output.as_bytes());
            let _ = stdout.flush();
            ExitCode::from(out.status as u8)
        }
        Err(e) => {
            eprintln!("tgv: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
