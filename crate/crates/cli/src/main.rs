fn main() {
    std::process::exit(bubblering_cli::main_with_args(std::env::args_os()));
}
