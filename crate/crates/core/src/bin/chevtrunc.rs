fn main() {
    std::process::exit(chevtrunc::cli::run(std::env::args_os()));
}
