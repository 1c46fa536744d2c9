use std::io::Write;

fn main() {
    let out = smallpoints::cli::run_from(std::env::args_os());
    // A closed pipe on either stream is not an error of the command.
    let _ = std::io::stdout().lock().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(out.stderr.as_bytes());
    std::process::exit(out.code);
}
