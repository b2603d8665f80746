use std::process::ExitCode;

fn main() -> ExitCode {
    let exec = sipkit::cli::execute(std::env::args().skip(1));
    ExitCode::from(sipkit::cli::exit_with(&exec) as u8)
}
