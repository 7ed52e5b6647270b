fn main() {
    std::process::exit(stripscreen::cli::dispatch(std::env::args_os()));
}
