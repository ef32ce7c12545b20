fn main() {
    std::process::exit(nilfourier::cli::main_with_args(std::env::args_os()));
}
