fn main() {
    std::process::exit(orthokit::cli::run());
}
