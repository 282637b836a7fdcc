fn main() {
    std::process::exit(terrain_toolkit::cli::run(std::env::args_os()));
}
