use clap::Parser;

fn main() {
    let cli = mzsim_cli::Cli::parse();
    if let Err(err) = mzsim_cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
