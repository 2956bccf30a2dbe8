fn main() {
    std::process::exit(mvblur::cli::main_with_args(std::env::args_os()));
}
