use clap::Parser;

fn main() {
    let cli = blowup_cli::Cli::parse();
    std::process::exit(blowup_cli::run(&cli));
}
