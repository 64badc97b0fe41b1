fn main() {
    std::process::exit(gcsplit::cli::main_with(std::env::args_os()));
}
