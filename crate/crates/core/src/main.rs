fn main() {
    std::process::exit(siet::cli::run(std::env::args_os()));
}
