fn main() {
    std::process::exit(reifdim::cli::run());
}
