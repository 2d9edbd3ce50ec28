fn main() {
    std::process::exit(edushard_cli::run(std::env::args_os()));
}
