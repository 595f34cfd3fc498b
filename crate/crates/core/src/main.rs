fn main() {
    std::process::exit(hderlab::cli::main_with_args(std::env::args_os()));
}
