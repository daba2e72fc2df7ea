fn main() {
    std::process::exit(srgpa_cli::run(std::env::args_os()));
}
