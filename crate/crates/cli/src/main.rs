use clap::Parser;
use spectral_moments_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    match spectral_moments_cli::run(&cli) {
        Ok(out) => print!("{out}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
