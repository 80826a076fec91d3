fn main() {
    std::process::exit(diffcon::cli::main());
}
