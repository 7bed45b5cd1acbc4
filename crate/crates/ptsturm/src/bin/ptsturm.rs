fn main() {
    std::process::exit(ptsturm::cli::run_from(std::env::args_os()));
}
