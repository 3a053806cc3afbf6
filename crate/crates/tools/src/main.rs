fn main() {
    std::process::exit(permconc_tools::cli::main());
}
