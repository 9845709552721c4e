use std::io;

fn main() {
    let code = mixident_cli::run(std::env::args_os().collect(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
