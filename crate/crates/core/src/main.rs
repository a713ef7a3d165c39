use std::io;
use std::process::ExitCode;
use std::thread;

// Deeply nested input recurses deeply in the parser.
const STACK_SIZE: usize = 512 * 1024 * 1024;

fn main() -> ExitCode {
    let code = thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(|| {
            lakepeg::cli::run(
                std::env::args_os(),
                &mut io::stdout().lock(),
                &mut io::stderr().lock(),
            )
        })
        .expect("failed to start the main thread")
        .join()
        .unwrap_or(lakepeg::cli::EXIT_ERROR);
    ExitCode::from(code as u8)
}
