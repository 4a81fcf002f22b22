use std::process::ExitCode;

fn main() -> ExitCode {
    qcc::bench::run_cli(std::env::args_os())
}
