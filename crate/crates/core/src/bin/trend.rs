fn main() {
    std::process::exit(trend_core::cli::main_with(std::env::args_os()));
}
