use clap::Parser;

fn main() {
    let cli = arctic_cli::args::Cli::parse();
    let code = match arctic_cli::run(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("arctic: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
