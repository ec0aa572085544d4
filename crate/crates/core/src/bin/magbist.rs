fn main() {
    std::process::exit(magnon_bistability::cli::run(std::env::args().collect()));
}
