fn main() {
    std::process::exit(vbank::cli::run_cli(std::env::args_os()));
}
