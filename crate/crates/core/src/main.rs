use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let output = maac::cli::main_with_args(std::env::args_os());
    print!("{}", output.stdout);
    eprint!("{}", output.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(output.status as u8)
}
