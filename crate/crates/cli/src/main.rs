fn main() {
    std::process::exit(cdt_cli::run());
}
