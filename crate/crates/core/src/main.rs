fn main() {
    std::process::exit(ipdyn::cli::main_with_args(std::env::args_os()));
}
