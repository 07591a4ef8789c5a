fn main() {
    std::process::exit(freediff::cli::main_with_args(std::env::args_os()));
}
