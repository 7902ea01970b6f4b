fn main() {
    std::process::exit(bter::cli::run(std::env::args_os()));
}
