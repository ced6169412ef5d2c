use std::process::ExitCode;

fn main() -> ExitCode {
    gdpsom::cli::main_with_args(std::env::args_os())
}
