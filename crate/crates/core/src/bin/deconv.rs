fn main() {
    std::process::exit(deconv::cli::run(std::env::args_os()));
}
