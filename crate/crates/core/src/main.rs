fn main() {
    std::process::exit(cavityio::cli::run(std::env::args_os()));
}
