fn main() {
    std::process::exit(euclid_cli::run(std::env::args_os()));
}
