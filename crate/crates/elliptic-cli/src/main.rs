fn main() {
    std::process::exit(elliptic_cli::run(std::env::args_os()));
}
