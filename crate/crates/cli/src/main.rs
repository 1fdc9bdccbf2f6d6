//! `partisan` — train, apply and evaluate the hyperpartisan text classifier.

mod args;
mod commands;
mod config;

use clap::Parser;

fn main() {
    let cli = args::Cli::parse();
    if let Err(err) = commands::run(cli) {
        // one line, machine parseable: "error: <cause>: <cause>: ..."
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
