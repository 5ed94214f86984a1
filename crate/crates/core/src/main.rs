fn main() {
    std::process::exit(kleinsail::cli::run(std::env::args_os()));
}
