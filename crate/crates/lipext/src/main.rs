fn main() {
    std::process::exit(lipext::cli::main_with_args(std::env::args()));
}
