fn main() {
    std::process::exit(copevolve_harness::cli::main_with_args(std::env::args_os()));
}
