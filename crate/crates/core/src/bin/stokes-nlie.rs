fn main() {
    std::process::exit(stokes_nlie::cli::run(std::env::args_os()));
}
