fn main() {
    std::process::exit(qflat_cli::run(std::env::args_os()));
}
