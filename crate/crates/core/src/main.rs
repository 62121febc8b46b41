fn main() {
    std::process::exit(gravham::cli::main_with_args(std::env::args_os()));
}
