use clap::Parser;

use kgraph_kms::cli_io::{main_with, Cli};

fn main() {
    std::process::exit(main_with(Cli::parse()));
}
