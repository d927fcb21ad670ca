fn main() {
    std::process::exit(placid::cli::run());
}
