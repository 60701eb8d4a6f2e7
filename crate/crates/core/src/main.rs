use clap::Parser;

fn main() {
    let cli = spectra::cli::Cli::parse();
    std::process::exit(spectra::cli::run(&cli));
}
