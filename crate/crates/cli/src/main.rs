use std::process::ExitCode;

fn main() -> ExitCode {
    negotiate::cli::main_with_args(std::env::args_os())
}
