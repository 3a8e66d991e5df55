fn main() {
    std::process::exit(fractional_hardy::cli::run(std::env::args_os()));
}
