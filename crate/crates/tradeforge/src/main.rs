use std::process::ExitCode;

fn main() -> ExitCode {
    tradeforge::cli::run()
}
