fn main() {
    std::process::exit(samtrace::cli::run(std::env::args_os()));
}
