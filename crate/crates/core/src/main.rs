fn main() {
    std::process::exit(delone_core::cli::run(std::env::args_os()));
}
