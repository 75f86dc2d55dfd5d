use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, out) = torsion_core::cli::run(std::env::args_os());
    let written = if code == 2 {
        std::io::stderr().write_all(out.as_bytes())
    } else {
        std::io::stdout().write_all(out.as_bytes())
    };
    if written.is_err() {
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
