fn main() {
    std::process::exit(semiodm::cli::main_with_args(std::env::args_os()));
}
