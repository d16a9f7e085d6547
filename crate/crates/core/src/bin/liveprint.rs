use clap::Parser;

fn main() {
    let cli = liveprint::cli::Cli::parse();
    std::process::exit(liveprint::cli::run(cli));
}
