use bb84_toolkit::cli;

fn main() {
    std::process::exit(cli::cli_run(std::env::args()));
}
