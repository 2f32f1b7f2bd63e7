fn main() {
    std::process::exit(oua::cli::main_with_args(std::env::args().collect()));
}
