fn main() {
    std::process::exit(subblock::cli::main_from_env());
}
