fn main() {
    std::process::exit(proxpath::cli::run(std::env::args_os()));
}
