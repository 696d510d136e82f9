fn main() {
    std::process::exit(gbach::cli::main());
}
