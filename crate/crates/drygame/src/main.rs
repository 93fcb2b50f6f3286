use clap::error::ErrorKind;
use clap::Parser;

fn main() {
    // Usage mistakes are configuration errors (exit 1); --help/--version are
    // successful runs. All other exit codes come from the command itself.
    let cli = match drygame::cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => drygame::cli::EXIT_CONFIG,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(drygame::cli::run(cli));
}
