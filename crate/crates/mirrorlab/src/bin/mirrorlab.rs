fn main() {
    let code = mirrorlab::cli::main_with_args(std::env::args_os(), std::env::var("MIRRORLAB_SEED").ok());
    std::process::exit(code);
}
