use clap::Parser;

fn main() {
    let cli = hommeas_cli::Cli::parse();
    let stdout = std::io::stdout();
    if let Err(e) = hommeas_cli::run(cli, &mut stdout.lock()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
