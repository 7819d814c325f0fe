fn main() {
    std::process::exit(remez_lab_core::cli::run());
}
