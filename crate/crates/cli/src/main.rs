use clap::Parser;

fn main() {
    let cli = qrk_cli::Cli::parse();
    std::process::exit(qrk_cli::run(cli));
}
