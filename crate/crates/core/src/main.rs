use std::io::{stderr, stdout};
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Some(threads) = std::env::var("TFROTOR_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&t| t > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let code = tfrotor::cli::run(std::env::args_os(), &mut stdout().lock(), &mut stderr().lock());
    ExitCode::from(code as u8)
}
