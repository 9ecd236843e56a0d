fn main() {
    std::process::exit(lcdsc::cli::main_with_args(std::env::args_os()));
}
