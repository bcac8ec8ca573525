fn main() {
    std::process::exit(gridsmith::cli::run());
}
