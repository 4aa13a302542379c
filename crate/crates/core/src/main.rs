fn main() {
    std::process::exit(storygame::cli::run(std::env::args_os()));
}
