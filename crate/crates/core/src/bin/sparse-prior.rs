fn main() {
    std::process::exit(sparse_prior::cli::main_with_args(std::env::args_os()));
}
