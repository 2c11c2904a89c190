fn main() {
    std::process::exit(orthoentropy::cli::main_with_args(std::env::args_os()));
}
