fn main() {
    std::process::exit(jn_bellman::cli::main_with_args(std::env::args_os()));
}
