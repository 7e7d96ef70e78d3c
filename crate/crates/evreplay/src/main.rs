use std::process::ExitCode;

fn main() -> ExitCode {
    evreplay::cli::main_with_args(std::env::args_os())
}
