use std::process::ExitCode;

use traffic_gpc_cli::{execute, parse_args, USAGE};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match parse_args(&args) {
        Ok(invocation) => ExitCode::from(execute(&invocation) as u8),
        Err(message) => {
            eprintln!("{message}\n{USAGE}");
            ExitCode::from(2)
        }
    }
}
