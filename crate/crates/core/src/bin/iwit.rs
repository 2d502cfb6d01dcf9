fn main() {
    std::process::exit(iwit::cli::run(std::env::args_os()));
}
