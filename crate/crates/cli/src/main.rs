fn main() {
    std::process::exit(rydswap_cli::app::main());
}
