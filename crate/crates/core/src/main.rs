fn main() {
    std::process::exit(aid_core::cli::main_with_args(std::env::args_os()));
}
