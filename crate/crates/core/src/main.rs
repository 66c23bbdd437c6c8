fn main() {
    std::process::exit(promptaug::runner::main_with_args(std::env::args_os()));
}
