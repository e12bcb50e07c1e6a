fn main() {
    std::process::exit(pfgame::cli::run(std::env::args_os()));
}
