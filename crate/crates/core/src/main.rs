fn main() {
    std::process::exit(nstar::cli::run(std::env::args_os()));
}
