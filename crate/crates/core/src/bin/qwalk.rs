fn main() {
    std::process::exit(qwalk::cli::run(std::env::args()));
}
