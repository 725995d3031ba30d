use std::io;

fn main() {
    let code = fatou_core::cli::run(std::env::args_os(), &mut io::stdout().lock());
    std::process::exit(code);
}
