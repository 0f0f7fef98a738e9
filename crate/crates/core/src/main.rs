use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, text) = hilbert_horo::cli::run(std::env::args_os());
    if code == 0 || !text.starts_with("error") {
        print!("{text}");
        let _ = std::io::stdout().flush();
    } else {
        eprint!("{text}");
    }
    ExitCode::from(code as u8)
}
