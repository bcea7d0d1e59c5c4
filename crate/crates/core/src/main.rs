fn main() {
    std::process::exit(lightray::cli::run(std::env::args_os()));
}
