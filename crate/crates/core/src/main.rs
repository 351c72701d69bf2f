fn main() {
    std::process::exit(wicknls::cli_io::run_cli(std::env::args_os()));
}
