use clap::Parser;

use dtnsim::cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    std::process::exit(execute(cli));
}
