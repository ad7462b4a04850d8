fn main() {
    std::process::exit(conformal_safety::cli::main_from_args(std::env::args_os()));
}
