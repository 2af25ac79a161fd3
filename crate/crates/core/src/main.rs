fn main() {
    std::process::exit(nonmarkov::cli::run(std::env::args_os()));
}
