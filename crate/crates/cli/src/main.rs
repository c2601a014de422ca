use clap::Parser;
use lyricscope_cli::{run, Cli, CliError};

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: cannot start {n} threads: {e}");
            std::process::exit(CliError::USAGE);
        }
    }
    match run(&cli) {
        Ok(messages) => {
            for m in messages {
                println!("{m}");
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
