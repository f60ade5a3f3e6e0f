fn main() {
    std::process::exit(plateful_cli::run(std::env::args_os()));
}
