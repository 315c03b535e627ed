use clap::Parser;

use gratingsim_cli::{configure_workers, run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_workers().and_then(|_| run(&cli)) {
        eprintln!("gratingsim: {e}");
        std::process::exit(e.exit_code());
    }
}
