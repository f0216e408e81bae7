fn main() {
    std::process::exit(extremal::cli::main_with_args(std::env::args_os()));
}
