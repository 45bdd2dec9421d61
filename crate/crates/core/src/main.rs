fn main() {
    std::process::exit(arman::cli::main_with_args(std::env::args_os()));
}
