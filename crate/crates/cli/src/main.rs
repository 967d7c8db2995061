fn main() {
    std::process::exit(parking_cli::run(std::env::args_os()));
}
