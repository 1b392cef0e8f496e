fn main() {
    std::process::exit(mopass::cli::run());
}
