fn main() {
    std::process::exit(cyclic_shuffle::cli::run_cli(std::env::args_os()));
}
