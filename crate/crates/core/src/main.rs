use clap::Parser;

use xebstat::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("xebstat: {e}");
        std::process::exit(e.exit_code());
    }
}
