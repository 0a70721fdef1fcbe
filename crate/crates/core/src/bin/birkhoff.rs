fn main() {
    std::process::exit(birkhoff_core::cli::main());
}
