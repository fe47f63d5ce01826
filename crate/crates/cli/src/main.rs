fn main() {
    std::process::exit(dwrs_cli::run(std::env::args_os()));
}
