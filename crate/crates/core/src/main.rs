fn main() {
    std::process::exit(emck::cli::run(std::env::args_os()));
}
