use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mediacensus::cli::run(std::env::args_os()))
}
