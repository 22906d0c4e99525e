use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use covert_watch::{init_threads, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|_| run(&cli)).and_then(|(text, out)| {
        match out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("covert-watch: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
