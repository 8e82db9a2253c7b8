use std::io;

fn main() {
    let code = ridgesketch::cli::run_cli(std::env::args().skip(1), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
