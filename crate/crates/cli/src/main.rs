fn main() {
    std::process::exit(conjlen::app::main_with_args(std::env::args_os()));
}
