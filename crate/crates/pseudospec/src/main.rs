fn main() {
    std::process::exit(pseudospec::cli::run(std::env::args()));
}
