fn main() {
    std::process::exit(blochwave::cli::run(std::env::args_os()));
}
