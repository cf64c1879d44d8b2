fn main() {
    std::process::exit(pathspin::cli::main_with_args(std::env::args_os()));
}
