fn main() {
    std::process::exit(compilance::cli::run(std::env::args_os()));
}
