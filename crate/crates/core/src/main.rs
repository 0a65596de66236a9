fn main() {
    std::process::exit(theicp::cli::run(std::env::args_os()));
}
