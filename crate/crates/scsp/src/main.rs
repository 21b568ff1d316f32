fn main() {
    std::process::exit(scsp::cli::run(std::env::args().collect()));
}
