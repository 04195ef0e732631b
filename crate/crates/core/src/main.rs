use clap::Parser;

use rashba_qes_core::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
