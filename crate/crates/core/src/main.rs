fn main() {
    std::process::exit(stochsynth::cli::main_with_args(std::env::args_os()));
}
