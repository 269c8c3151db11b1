use clap::Parser;

use parampli::cli::{self, Cli};

fn main() {
    let args = Cli::parse();
    match cli::run(&args) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
