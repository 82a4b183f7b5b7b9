fn main() {
    std::process::exit(multiplier_lab::cli::main_with_args(std::env::args_os()));
}
