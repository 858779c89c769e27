use clap::Parser;
use wgf::cli::{exit_code, run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("wgf: {e}");
        std::process::exit(exit_code(&e));
    }
}
