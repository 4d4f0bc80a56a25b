use clap::Parser;

fn main() {
    let cli = lossbound::cli::Cli::parse();
    std::process::exit(lossbound::cli::run(cli));
}
