fn main() {
    std::process::exit(twodel::cli::main_with_args(std::env::args_os()));
}
