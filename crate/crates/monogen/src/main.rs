fn main() {
    std::process::exit(monogen::cli::run(std::env::args_os()));
}
