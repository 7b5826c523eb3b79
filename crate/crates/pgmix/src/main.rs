fn main() {
    std::process::exit(pgmix::cli::run());
}
