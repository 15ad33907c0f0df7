fn main() {
    std::process::exit(rectiscope_cli::main_with_args(std::env::args_os()));
}
