fn main() {
    std::process::exit(ppc_core::cli::run_cli(std::env::args_os()));
}
