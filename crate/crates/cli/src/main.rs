use std::io::Write;

fn main() {
    if let Err(e) = tailtest_cli::init_threads() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = tailtest_cli::run(std::env::args_os(), &mut out, &mut err);
    let _ = out.flush();
    std::process::exit(code);
}
