fn main() {
    std::process::exit(abot_cli::run(std::env::args_os()));
}
