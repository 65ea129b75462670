use std::process::ExitCode;

fn main() -> ExitCode {
    memread_cli::main_with_args(std::env::args_os())
}
