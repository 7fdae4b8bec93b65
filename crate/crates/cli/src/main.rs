use clap::Parser;

fn main() {
    let cli = cvd_cli::app::Cli::parse();
    std::process::exit(cvd_cli::app::run(cli));
}
