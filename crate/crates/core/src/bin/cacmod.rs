use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = cacmod::cli::main_with_args(std::env::args_os());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    ExitCode::from(outcome.code.clamp(0, 255) as u8)
}
