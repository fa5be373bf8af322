use std::process::ExitCode;

fn main() -> ExitCode {
    repairtime::cli::main()
}
