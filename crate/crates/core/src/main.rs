fn main() {
    std::process::exit(hardy_means::cli::main());
}
