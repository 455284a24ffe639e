fn main() {
    std::process::exit(qscatter_cli::run(std::env::args_os()));
}
