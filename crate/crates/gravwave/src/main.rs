use clap::Parser;

use gravwave::cli::{execute, exit_code, Cli};

fn main() {
    let cli = Cli::parse();
    let outcome = execute(cli);
    if let Err(e) = &outcome {
        eprintln!("gravwave: {e}");
    }
    std::process::exit(exit_code(&outcome));
}
