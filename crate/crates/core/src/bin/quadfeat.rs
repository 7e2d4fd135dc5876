fn main() {
    std::process::exit(quadfeat::cli::run(std::env::args_os()));
}
