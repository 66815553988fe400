use std::process::ExitCode;

fn main() -> ExitCode {
    mrz::run(std::env::args_os())
}
