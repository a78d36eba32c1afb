fn main() {
    std::process::exit(heisenberg_whitney::cli::main_with(std::env::args_os()));
}
