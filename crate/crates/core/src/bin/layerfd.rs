fn main() {
    std::process::exit(layerfd::cli::run(std::env::args_os()));
}
