use clap::Parser;

fn main() {
    std::process::exit(smlab::cli::run(smlab::cli::Cli::parse()));
}
