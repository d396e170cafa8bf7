fn main() {
    std::process::exit(isotrans::cli::run(std::env::args_os()));
}
