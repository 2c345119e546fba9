fn main() {
    std::process::exit(bmsynth::cli::run(std::env::args_os()));
}
