fn main() {
    std::process::exit(zeta_arg_lab::cli::dispatch(std::env::args_os()));
}
