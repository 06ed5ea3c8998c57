fn main() {
    std::process::exit(doublepass_cli::run(std::env::args_os()));
}
