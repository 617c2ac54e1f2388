fn main() {
    std::process::exit(everkin::harness::cli::cli_main(std::env::args_os()));
}
