use clap::Parser;

fn main() {
    let cli = ramix::app::Cli::parse();
    match ramix::app::run(&cli) {
        Ok(summary) => eprint!("{summary}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
