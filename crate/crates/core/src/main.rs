fn main() {
    std::process::exit(fractal_core::cli::run(std::env::args_os()));
}
