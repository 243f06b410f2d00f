use std::io::Write;

fn main() {
    let out = tdk_cli::run(std::env::args());
    let mut stdout = std::io::stdout().lock();
    // a closed pipe is not worth a second error
    let _ = stdout.write_all(out.output.as_bytes());
    let _ = stdout.flush();
    std::process::exit(out.code);
}
