fn main() {
    std::process::exit(lpmix::cli::main_with_args(std::env::args_os()));
}
