fn main() {
    std::process::exit(homcount_cli::run(std::env::args_os()));
}
