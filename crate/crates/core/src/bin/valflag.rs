use std::io::Write;
use std::process::ExitCode;

use valflag::cli::{run, EXIT_USAGE, RADICAL_CAP_ENV};
use valflag::scalars::set_radical_cap;

fn main() -> ExitCode {
    if let Ok(v) = std::env::var(RADICAL_CAP_ENV) {
        match v.trim().parse::<usize>() {
            Ok(cap) => set_radical_cap(cap),
            Err(_) => {
                eprintln!("error: {RADICAL_CAP_ENV} must be a nonnegative integer, got `{v}`");
                return ExitCode::from(EXIT_USAGE as u8);
            }
        }
    }
    let out = run(std::env::args_os());
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
